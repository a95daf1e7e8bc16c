/** Removable term chips plus an input for adding terms by hand. */

export interface ChipHandlers {
  onRemove: (index: number) => void;
  onAdd: (term: string) => void;
}

export function renderChips(
  container: HTMLElement,
  terms: string[],
  handlers: ChipHandlers,
): void {
  container.textContent = "";
  terms.forEach((term, i) => {
    const chip = document.createElement("span");
    chip.className = "chip";
    const label = document.createElement("span");
    label.className = "chip-label";
    label.textContent = term;
    chip.appendChild(label);
    const remove = document.createElement("button");
    remove.type = "button";
    remove.className = "chip-remove";
    remove.textContent = "×";
    remove.setAttribute("aria-label", `remove ${term}`);
    remove.addEventListener("click", () => handlers.onRemove(i));
    chip.appendChild(remove);
    container.appendChild(chip);
  });

  const input = document.createElement("input");
  input.type = "text";
  input.className = "chip-input";
  input.placeholder = terms.length ? "" : "add terms";
  input.addEventListener("keydown", (ev: KeyboardEvent) => {
    if (ev.key === "Enter" || ev.key === ",") {
      ev.preventDefault();
      if (input.value.trim()) {
        handlers.onAdd(input.value);
        input.value = "";
      }
    } else if (ev.key === "Backspace" && input.value === "" && terms.length) {
      handlers.onRemove(terms.length - 1);
    }
  });
  container.appendChild(input);
}
