/** DOM modals: the alarm question and the post-drill questionnaire.
 *
 * The question modal renders the server-provided option texts verbatim
 * in the order received and sends exactly one answer no matter how
 * fast the player clicks. The questionnaire enables submit only once
 * all five rows have a yes/no selection.
 */

import { PostGameQuestion } from "./questions";

export class QuestionModal {
  private overlay: HTMLElement | null = null;
  private answered = false;

  get open(): boolean {
    return this.overlay !== null;
  }

  show(
    prompt: string,
    options: Array<[string, string]>,
    onAnswer: (choice: string) => void,
  ): void {
    this.hide();
    this.answered = false;
    const overlay = document.createElement("div");
    overlay.className = "modal-overlay";
    const box = document.createElement("div");
    box.className = "modal-box";
    overlay.appendChild(box);

    const h = document.createElement("div");
    h.className = "modal-prompt";
    h.textContent = prompt;
    box.appendChild(h);

    for (const [key, text] of options) {
      const btn = document.createElement("button");
      btn.className = "modal-option";
      btn.dataset.choice = key;
      btn.textContent = `${key}) ${text}`;
      btn.addEventListener("click", () => {
        if (this.answered) return;
        this.answered = true;
        this.hide();
        onAnswer(key);
      });
      box.appendChild(btn);
    }

    document.body.appendChild(overlay);
    this.overlay = overlay;
  }

  hide(): void {
    this.overlay?.remove();
    this.overlay = null;
  }
}

export class PostGameForm {
  private overlay: HTMLElement | null = null;
  private submitted = false;

  get open(): boolean {
    return this.overlay !== null;
  }

  show(
    questions: PostGameQuestion[],
    onSubmit: (answers: Record<string, boolean>) => void,
  ): void {
    this.hide();
    this.submitted = false;
    const picked = new Map<string, boolean>();

    const overlay = document.createElement("div");
    overlay.className = "modal-overlay";
    const box = document.createElement("div");
    box.className = "modal-box";
    overlay.appendChild(box);

    const h = document.createElement("div");
    h.className = "modal-prompt";
    h.textContent = "Before you go: five quick questions";
    box.appendChild(h);

    const submit = document.createElement("button");
    submit.className = "modal-submit";
    submit.textContent = "Submit";
    submit.disabled = true;

    for (const q of questions) {
      const row = document.createElement("div");
      row.className = "form-row";
      const text = document.createElement("span");
      text.className = "form-question";
      text.textContent = q.text;
      row.appendChild(text);
      for (const val of [true, false]) {
        const lbl = document.createElement("label");
        const radio = document.createElement("input");
        radio.type = "radio";
        radio.name = q.key;
        radio.value = String(val);
        radio.addEventListener("change", () => {
          picked.set(q.key, val);
          submit.disabled = picked.size < questions.length;
        });
        lbl.appendChild(radio);
        lbl.appendChild(document.createTextNode(val ? "yes" : "no"));
        row.appendChild(lbl);
      }
      box.appendChild(row);
    }

    submit.addEventListener("click", () => {
      if (this.submitted || picked.size < questions.length) return;
      this.submitted = true;
      const answers: Record<string, boolean> = {};
      for (const [k, v] of picked) answers[k] = v;
      this.hide();
      onSubmit(answers);
    });
    box.appendChild(submit);

    document.body.appendChild(overlay);
    this.overlay = overlay;
  }

  hide(): void {
    this.overlay?.remove();
    this.overlay = null;
  }
}

/** Transient center-screen banner (greeting, finish notice). */
export function toast(text: string, ms = 4000): void {
  const el = document.createElement("div");
  el.className = "toast";
  el.textContent = text;
  document.body.appendChild(el);
  setTimeout(() => el.remove(), ms);
}
