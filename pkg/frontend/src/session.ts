/**
 * Client-side review session state.
 *
 * Holds the note, the editable term list, results, selection, and history.
 * The view layer subscribes via onChange and re-renders from this state;
 * nothing here touches the DOM, so the whole machine is testable headless.
 */

import {
  ApiError,
  SearchBody,
  SearchHit,
  Strategy,
  TrialDoc,
  getTrial,
  postGenerate,
  postSearch,
} from "./api.js";

export interface HistoryEntry {
  terms: string[];
  strategy: Strategy;
  note: string;
  resultCount: number;
}

export interface GenerationInfo {
  latencyS: number;
  termCount: number;
  modelName: string;
}

export class ReviewSession {
  noteText = "";
  terms: string[] = [];
  strategy: Strategy = "generated_only";
  k = 20;

  results: SearchHit[] = [];
  selectedTrial: TrialDoc | null = null;
  history: HistoryEntry[] = [];

  // The verbatim model output. Edits only ever touch `terms`, so the
  // original stays available for diffing against the reviewed query.
  rawGeneration: string | null = null;
  generationInfo: GenerationInfo | null = null;

  generateUnavailable: string | null = null;
  toast: string | null = null;
  generating = false;
  searching = false;

  onChange: () => void = () => {};

  // One in-flight request of each kind; a newer request bumps the
  // sequence number and the stale response is dropped on arrival.
  private generateSeq = 0;
  private searchSeq = 0;
  private detailSeq = 0;

  canGenerate(): boolean {
    return this.noteText.trim().length > 0;
  }

  canSearch(): boolean {
    if (this.strategy === "generated_only") return this.terms.length > 0;
    return this.noteText.trim().length > 0;
  }

  async generate(): Promise<void> {
    if (!this.canGenerate()) return;
    const seq = ++this.generateSeq;
    this.generating = true;
    this.onChange();
    try {
      const resp = await postGenerate(this.noteText);
      if (seq !== this.generateSeq) return;
      this.rawGeneration = resp.raw_generation;
      this.terms = [...resp.processed_terms];
      this.generationInfo = {
        latencyS: resp.latency_s,
        termCount: resp.term_count,
        modelName: resp.model_name,
      };
      this.generateUnavailable = null;
    } catch (err) {
      if (seq !== this.generateSeq) return;
      if (err instanceof ApiError && err.status === 503) {
        this.generateUnavailable = err.hint ?? err.message;
      } else {
        this.toast = err instanceof Error ? err.message : String(err);
      }
    } finally {
      if (seq === this.generateSeq) {
        this.generating = false;
        this.onChange();
      }
    }
  }

  searchBody(): SearchBody {
    if (this.strategy === "generated_only") {
      return { terms: [...this.terms], strategy: this.strategy, k: this.k };
    }
    if (this.strategy === "note") {
      return { note: this.noteText, strategy: this.strategy, k: this.k };
    }
    return {
      note: this.noteText,
      terms: [...this.terms],
      strategy: this.strategy,
      k: this.k,
    };
  }

  async search(): Promise<void> {
    if (!this.canSearch()) return;
    const seq = ++this.searchSeq;
    this.searching = true;
    this.onChange();
    const executed: HistoryEntry = {
      terms: [...this.terms],
      strategy: this.strategy,
      note: this.noteText,
      resultCount: 0,
    };
    try {
      const hits = await postSearch(this.searchBody());
      if (seq !== this.searchSeq) return;
      this.results = hits;
      executed.resultCount = hits.length;
      this.history.unshift(executed);
      this.toast = null;
    } catch (err) {
      // previous results stay on screen; the failure is only a toast
      if (seq !== this.searchSeq) return;
      this.toast = err instanceof Error ? err.message : String(err);
    } finally {
      if (seq === this.searchSeq) {
        this.searching = false;
        this.onChange();
      }
    }
  }

  /** Banner fallback when generation is unavailable: search the note as-is. */
  async searchWithNote(): Promise<void> {
    this.strategy = "note";
    await this.search();
  }

  removeTerm(index: number): void {
    if (index < 0 || index >= this.terms.length) return;
    this.terms.splice(index, 1);
    this.onChange();
  }

  addTerm(term: string): void {
    const t = term.trim();
    if (!t) return;
    this.terms.push(t);
    this.onChange();
  }

  /** Raw-text mode: whitespace- or comma-separated terms. */
  setTermsFromText(text: string): void {
    this.terms = text
      .split(/[\s,]+/)
      .map((t) => t.trim())
      .filter((t) => t.length > 0);
    this.onChange();
  }

  termsAsText(): string {
    return this.terms.join(" ");
  }

  restoreHistory(index: number): void {
    const entry = this.history[index];
    if (!entry) return;
    this.terms = [...entry.terms];
    this.strategy = entry.strategy;
    this.noteText = entry.note;
    this.onChange();
  }

  async selectTrial(docno: string): Promise<void> {
    const seq = ++this.detailSeq;
    try {
      const doc = await getTrial(docno);
      if (seq !== this.detailSeq) return;
      this.selectedTrial = doc;
      this.onChange();
    } catch (err) {
      if (seq !== this.detailSeq) return;
      this.toast = err instanceof Error ? err.message : String(err);
      this.onChange();
    }
  }

  dismissToast(): void {
    this.toast = null;
    this.onChange();
  }

  dismissBanner(): void {
    this.generateUnavailable = null;
    this.onChange();
  }
}
