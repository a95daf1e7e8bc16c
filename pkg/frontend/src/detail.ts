/** Trial detail pane. Eligibility gets its own visually distinct section. */

import { TrialDoc } from "./api.js";

function section(heading: string, text: string, cls?: string): HTMLElement {
  const div = document.createElement("section");
  if (cls) div.className = cls;
  const h = document.createElement("h3");
  h.textContent = heading;
  div.appendChild(h);
  const p = document.createElement("p");
  p.textContent = text;
  div.appendChild(p);
  return div;
}

export function renderTrialDetail(container: HTMLElement, doc: TrialDoc): void {
  container.textContent = "";

  const title = document.createElement("h2");
  title.textContent = doc.title || doc.docno;
  container.appendChild(title);

  const meta = document.createElement("p");
  meta.className = "trial-meta";
  const parts = [doc.docno];
  if (doc.gender) parts.push(doc.gender);
  if (doc.min_age || doc.max_age) {
    parts.push(`ages ${doc.min_age || "?"} to ${doc.max_age || "?"}`);
  }
  meta.textContent = parts.join(" · ");
  container.appendChild(meta);

  if (doc.conditions.length) {
    const cond = document.createElement("p");
    cond.className = "trial-conditions";
    cond.textContent = doc.conditions.join(", ");
    container.appendChild(cond);
  }

  if (doc.brief_summary) {
    container.appendChild(section("Summary", doc.brief_summary));
  }
  if (doc.detailed_description) {
    container.appendChild(section("Description", doc.detailed_description));
  }
  // the section the reviewer actually decides on
  if (doc.eligibility_text) {
    container.appendChild(
      section("Eligibility criteria", doc.eligibility_text, "eligibility-section"),
    );
  }
}
