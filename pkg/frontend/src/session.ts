/**
 * Rating-session state machine.
 *
 * One session walks the staged protocol: load the current stage's list,
 * collect a rating or an explicit skip for every card, submit, show the
 * weight movement, then advance to the next stage (whose list never
 * repeats candidates already shown).  Skipping is not a zero rating: a
 * skipped candidate is simply left out of the submission.
 */

import { ApiClient, RatingsResponse, SessionView } from './api.js';
import { parseRating } from './validate.js';

export type Phase = 'loading' | 'rating' | 'adapted' | 'failed';

export class RatingSession {
  phase: Phase = 'loading';
  view: SessionView | null = null;
  lastResult: RatingsResponse | null = null;
  error: string | null = null;

  private ratings = new Map<string, number>();
  private skipped = new Set<string>();

  constructor(
    private readonly client: ApiClient,
    readonly user: string,
  ) {}

  get presentedCandidates(): string[] {
    return (this.view?.presented ?? []).map((entry) => entry.candidate);
  }

  async load(): Promise<SessionView> {
    this.phase = 'loading';
    try {
      this.view = await this.client.getSession(this.user);
    } catch (err) {
      this.phase = 'failed';
      this.error = err instanceof Error ? err.message : String(err);
      throw err;
    }
    this.ratings.clear();
    this.skipped.clear();
    this.error = null;
    this.phase = this.view.rated ? 'adapted' : 'rating';
    return this.view;
  }

  /** Record one rating; rejects unknown candidates and out-of-range values. */
  rate(candidate: string, raw: string | number): boolean {
    if (!this.presentedCandidates.includes(candidate)) {
      this.error = `candidate ${candidate} is not part of this session`;
      return false;
    }
    const value = parseRating(raw);
    if (value === null) {
      this.error = 'ratings must be numbers between 0 and 1';
      return false;
    }
    this.skipped.delete(candidate);
    this.ratings.set(candidate, value);
    this.error = null;
    return true;
  }

  skip(candidate: string): boolean {
    if (!this.presentedCandidates.includes(candidate)) {
      return false;
    }
    this.ratings.delete(candidate);
    this.skipped.add(candidate);
    return true;
  }

  ratingOf(candidate: string): number | undefined {
    return this.ratings.get(candidate);
  }

  isSkipped(candidate: string): boolean {
    return this.skipped.has(candidate);
  }

  /** Submission unlocks once every card is rated or skipped, with >= 1 rating. */
  canSubmit(): boolean {
    if (this.phase !== 'rating' || this.view === null) {
      return false;
    }
    const done = this.presentedCandidates.every(
      (candidate) => this.ratings.has(candidate) || this.skipped.has(candidate),
    );
    return done && this.ratings.size > 0;
  }

  async submit(): Promise<RatingsResponse> {
    if (!this.canSubmit()) {
      throw new Error('every card must be rated or skipped before submitting');
    }
    const payload = Object.fromEntries(this.ratings);
    this.lastResult = await this.client.submitRatings(this.user, payload);
    this.phase = 'adapted';
    return this.lastResult;
  }

  /** Fetch the next stage's list after an adapted view. */
  async advance(): Promise<SessionView> {
    if (this.phase !== 'adapted') {
      throw new Error('advance is only available after ratings were submitted');
    }
    return this.load();
  }
}
