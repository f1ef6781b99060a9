/** Post-drill questionnaire shown after the finished frame. */

export interface PostGameQuestion {
  key: string;
  text: string;
}

export const POST_GAME_QUESTIONS: PostGameQuestion[] = [
  { key: "is_gamer", text: "Regular video game player" },
  { key: "fire_training", text: "Previous training in fire safety" },
  { key: "drill_experience", text: "Previous fire drill's experience" },
  { key: "real_fire_experience", text: "Been into a real fire" },
  { key: "followed_signage", text: "Followed emergency signage to find exit route" },
];
