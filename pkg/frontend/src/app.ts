/**
 * Page wiring: binds the review session to the static shell in index.html.
 *
 * All state lives in ReviewSession; this module just re-renders from it on
 * every change and forwards DOM events back in.
 */

import { renderChips } from "./chips.js";
import { renderTrialDetail } from "./detail.js";
import { ReviewSession } from "./session.js";
import { Strategy } from "./api.js";

function byId<T extends HTMLElement>(id: string): T {
  const el = document.getElementById(id);
  if (!el) throw new Error(`missing element #${id}`);
  return el as T;
}

export function initApp(): ReviewSession {
  const session = new ReviewSession();

  const note = byId<HTMLTextAreaElement>("note");
  const generateBtn = byId<HTMLButtonElement>("generate");
  const genStats = byId<HTMLSpanElement>("gen-stats");
  const banner = byId<HTMLDivElement>("banner");
  const bannerMsg = byId<HTMLSpanElement>("banner-msg");
  const bannerFallback = byId<HTMLButtonElement>("banner-fallback");
  const bannerDismiss = byId<HTMLButtonElement>("banner-dismiss");
  const chips = byId<HTMLDivElement>("chips");
  const rawTerms = byId<HTMLTextAreaElement>("raw-terms");
  const rawToggle = byId<HTMLInputElement>("raw-toggle");
  const strategySel = byId<HTMLSelectElement>("strategy");
  const searchBtn = byId<HTMLButtonElement>("search");
  const resultsEl = byId<HTMLOListElement>("results");
  const detailEl = byId<HTMLDivElement>("detail");
  const historyEl = byId<HTMLUListElement>("history");
  const toast = byId<HTMLDivElement>("toast");

  let rawMode = false;

  function syncRawTerms(): void {
    if (rawMode && rawTerms.value.trim() !== session.termsAsText()) {
      session.setTermsFromText(rawTerms.value);
    }
  }

  function render(): void {
    generateBtn.disabled = !session.canGenerate() || session.generating;
    generateBtn.textContent = session.generating ? "Generating..." : "Generate query";
    searchBtn.disabled = !session.canSearch() || session.searching;
    searchBtn.textContent = session.searching ? "Searching..." : "Search";
    strategySel.value = session.strategy;
    if (note.value !== session.noteText && document.activeElement !== note) {
      note.value = session.noteText;
    }

    if (session.generationInfo) {
      const info = session.generationInfo;
      genStats.textContent =
        `${info.termCount} terms in ${info.latencyS.toFixed(2)}s (${info.modelName})`;
    } else {
      genStats.textContent = "";
    }

    banner.hidden = session.generateUnavailable === null;
    bannerMsg.textContent = session.generateUnavailable ?? "";

    chips.hidden = rawMode;
    rawTerms.hidden = !rawMode;
    if (!rawMode) {
      renderChips(chips, session.terms, {
        onRemove: (i) => session.removeTerm(i),
        onAdd: (t) => session.addTerm(t),
      });
    } else if (document.activeElement !== rawTerms) {
      rawTerms.value = session.termsAsText();
    }

    resultsEl.textContent = "";
    session.results.forEach((hit) => {
      const li = document.createElement("li");
      li.className = "result-row";
      li.dataset.docno = hit.docno;
      const head = document.createElement("div");
      head.className = "result-head";
      const title = document.createElement("span");
      title.className = "result-title";
      title.textContent = hit.title || hit.docno;
      head.appendChild(title);
      const score = document.createElement("span");
      score.className = "result-score";
      score.textContent = hit.score.toFixed(4);
      head.appendChild(score);
      li.appendChild(head);
      const snippet = document.createElement("p");
      snippet.className = "result-snippet";
      snippet.textContent = hit.snippet;
      li.appendChild(snippet);
      li.addEventListener("click", () => void session.selectTrial(hit.docno));
      if (session.selectedTrial && session.selectedTrial.docno === hit.docno) {
        li.classList.add("selected");
      }
      resultsEl.appendChild(li);
    });

    detailEl.textContent = "";
    if (session.selectedTrial) {
      renderTrialDetail(detailEl, session.selectedTrial);
    }

    historyEl.textContent = "";
    session.history.forEach((entry, i) => {
      const li = document.createElement("li");
      li.className = "history-row";
      const label = document.createElement("span");
      const query =
        entry.strategy === "note" ? entry.note : entry.terms.join(" ");
      label.textContent = `${query} (${entry.strategy}, ${entry.resultCount} hits)`;
      li.appendChild(label);
      const restore = document.createElement("button");
      restore.type = "button";
      restore.textContent = "restore";
      restore.addEventListener("click", () => session.restoreHistory(i));
      li.appendChild(restore);
      historyEl.appendChild(li);
    });

    toast.hidden = session.toast === null;
    toast.textContent = session.toast ?? "";
  }

  session.onChange = render;

  note.addEventListener("input", () => {
    session.noteText = note.value;
    render();
  });
  generateBtn.addEventListener("click", () => void session.generate());
  bannerFallback.addEventListener("click", () => void session.searchWithNote());
  bannerDismiss.addEventListener("click", () => session.dismissBanner());
  strategySel.addEventListener("change", () => {
    session.strategy = strategySel.value as Strategy;
    render();
  });
  rawToggle.addEventListener("change", () => {
    if (rawMode) syncRawTerms();
    rawMode = rawToggle.checked;
    if (rawMode) rawTerms.value = session.termsAsText();
    render();
  });
  rawTerms.addEventListener("change", syncRawTerms);
  searchBtn.addEventListener("click", () => {
    syncRawTerms();
    void session.search();
  });
  toast.addEventListener("click", () => session.dismissToast());

  render();
  return session;
}
