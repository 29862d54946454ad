import { ApiClient, ApiError } from './api';
import { renderDifferential } from './differential';
import { buildPhaseForm, readFindings, renderPhaseForm } from './forms';
import type {
  CaseRecord,
  Catalog,
  DifferentialPayload,
  Findings,
  PhaseName,
} from './types';
import { PHASES } from './types';

type Step = PhaseName | 'review';

const STEPS: Step[] = [...PHASES, 'review'];

/** Consultation wizard: history -> examination -> investigation -> review.
 *
 * Navigation mirrors the service's ordering rule exactly (first submissions
 * only in phase order, later phases skippable, submitted phases reopenable),
 * so an order conflict from the service is unreachable through the UI.
 */
export class Wizard {
  private api: ApiClient;
  private root: HTMLElement;
  private catalog: Catalog | null = null;
  sessionId: string | null = null;
  patientId: string | null = null;
  private submitted = new Set<PhaseName>();
  private drafts: Partial<Record<PhaseName, Findings>> = {};
  private current: Step = 'history';
  private payload: DifferentialPayload | null = null;
  private record: CaseRecord | null = null;
  private banner: { message: string; retry: () => Promise<void> } | null = null;

  constructor(root: HTMLElement, api: ApiClient) {
    this.root = root;
    this.api = api;
  }

  async start(patientId: string): Promise<void> {
    await this.guard(async () => {
      this.catalog = await this.api.getCatalog();
      const session = await this.api.createSession(patientId);
      this.sessionId = session.session_id;
      this.patientId = session.patient_id;
      this.submitted = new Set();
      this.drafts = {};
      this.payload = null;
      this.record = null;
      this.current = 'history';
    }, () => this.start(patientId));
  }

  /** Reattach to an existing session; forms are pre-filled from service state. */
  async resume(sessionId: string): Promise<void> {
    await this.guard(async () => {
      this.catalog = await this.api.getCatalog();
      const session = await this.api.getSession(sessionId);
      this.sessionId = session.session_id;
      this.patientId = session.patient_id;
      this.submitted = new Set(
        PHASES.filter((p) => session.phase_status[p] === 'submitted')
      );
      this.drafts = { ...session.findings };
      this.record = null;
      this.payload =
        this.submitted.size > 0 ? await this.api.getDifferential(sessionId) : null;
      const next = PHASES.find((p) => this.canOpen(p) && !this.submitted.has(p));
      this.current = next ?? 'review';
    }, () => this.resume(sessionId));
  }

  /** A phase is reachable when re-editing it, or when it is the next legal
   * first submission (history first, later phases skippable, never
   * back-filled). */
  canOpen(phase: PhaseName): boolean {
    if (this.submitted.has(phase)) return true;
    if (phase !== 'history' && !this.submitted.has('history')) return false;
    const index = PHASES.indexOf(phase);
    return !PHASES.slice(index + 1).some((later) => this.submitted.has(later));
  }

  goTo(step: Step): void {
    if (step !== 'review' && !this.canOpen(step)) return;
    this.current = step;
    this.render();
  }

  async submitPhase(phase: PhaseName, findings: Findings): Promise<void> {
    if (!this.sessionId) throw new Error('no active session');
    await this.guard(async () => {
      this.payload = await this.api.submitPhase(this.sessionId!, phase, findings);
      this.submitted.add(phase);
      this.drafts[phase] = findings;
      const index = STEPS.indexOf(phase);
      this.current = STEPS[index + 1];
    }, () => this.submitPhase(phase, findings));
  }

  skipCurrent(): void {
    if (this.current === 'review') return;
    const index = STEPS.indexOf(this.current);
    this.current = STEPS[index + 1];
    this.render();
  }

  async finalize(): Promise<void> {
    if (!this.sessionId) throw new Error('no active session');
    await this.guard(async () => {
      this.record = await this.api.finalize(this.sessionId!);
      this.current = 'review';
    }, () => this.finalize());
  }

  private async guard(action: () => Promise<void>, retry: () => Promise<void>): Promise<void> {
    try {
      this.banner = null;
      await action();
    } catch (err) {
      if (err instanceof ApiError) {
        this.banner = { message: `${err.code}: ${err.message}`, retry };
      } else {
        throw err;
      }
    }
    this.render();
  }

  render(): void {
    this.root.innerHTML = '';
    this.root.appendChild(this.renderBanner());
    if (!this.sessionId || !this.catalog) return;
    this.root.appendChild(this.renderNav());
    const content = document.createElement('section');
    content.className = 'step-content';
    if (this.record) {
      content.appendChild(this.renderConfirmation(this.record));
    } else if (this.current === 'review') {
      content.appendChild(this.renderReview());
    } else {
      content.appendChild(this.renderPhaseStep(this.current));
    }
    this.root.appendChild(content);
    if (this.payload && !this.record) {
      const live = document.createElement('section');
      live.className = 'live-differential';
      live.appendChild(renderDifferential(this.payload));
      this.root.appendChild(live);
    }
  }

  private renderBanner(): HTMLElement {
    const holder = document.createElement('div');
    holder.className = 'banner-holder';
    if (!this.banner) return holder;
    const banner = document.createElement('div');
    banner.className = 'error-banner';
    const text = document.createElement('span');
    text.textContent = this.banner.message;
    banner.appendChild(text);
    const retry = document.createElement('button');
    retry.type = 'button';
    retry.className = 'retry';
    retry.textContent = 'Retry';
    const action = this.banner.retry;
    retry.addEventListener('click', () => void action());
    banner.appendChild(retry);
    holder.appendChild(banner);
    return holder;
  }

  private renderNav(): HTMLElement {
    const nav = document.createElement('nav');
    nav.className = 'wizard-nav';
    for (const step of STEPS) {
      const button = document.createElement('button');
      button.type = 'button';
      button.dataset.step = step;
      const state =
        step !== 'review' && this.submitted.has(step) ? ' (submitted)' : '';
      button.textContent = step + state;
      const reachable = step === 'review' || this.canOpen(step);
      button.disabled = !reachable || this.record !== null;
      if (step === this.current) button.classList.add('active');
      button.addEventListener('click', () => this.goTo(step));
      nav.appendChild(button);
    }
    return nav;
  }

  private renderPhaseStep(phase: PhaseName): HTMLElement {
    const wrap = document.createElement('div');
    wrap.className = 'phase-step';
    const heading = document.createElement('h2');
    heading.textContent = `${phase} findings for ${this.patientId}`;
    wrap.appendChild(heading);
    const model = buildPhaseForm(this.catalog!, phase);
    const form = renderPhaseForm(model, this.drafts[phase]);
    const submit = document.createElement('button');
    submit.type = 'submit';
    submit.className = 'submit-phase';
    submit.textContent = this.submitted.has(phase)
      ? `Re-submit ${phase}`
      : `Submit ${phase}`;
    form.appendChild(submit);
    form.addEventListener('submit', (event) => {
      event.preventDefault();
      void this.submitPhase(phase, readFindings(form, model));
    });
    wrap.appendChild(form);
    if (phase !== 'history') {
      const skip = document.createElement('button');
      skip.type = 'button';
      skip.className = 'skip-phase';
      skip.textContent = `Skip ${phase}`;
      skip.addEventListener('click', () => this.skipCurrent());
      wrap.appendChild(skip);
    }
    return wrap;
  }

  private renderReview(): HTMLElement {
    const wrap = document.createElement('div');
    wrap.className = 'review-step';
    const heading = document.createElement('h2');
    heading.textContent = 'Review and finalize';
    wrap.appendChild(heading);
    const finalize = document.createElement('button');
    finalize.type = 'button';
    finalize.className = 'finalize';
    finalize.textContent = 'Finalize consultation';
    finalize.disabled = this.submitted.size === 0;
    finalize.addEventListener('click', () => void this.finalize());
    wrap.appendChild(finalize);
    return wrap;
  }

  private renderConfirmation(record: CaseRecord): HTMLElement {
    const wrap = document.createElement('div');
    wrap.className = 'confirmation';
    const heading = document.createElement('h2');
    heading.textContent = 'Case record stored';
    wrap.appendChild(heading);
    const id = document.createElement('p');
    id.className = 'record-id';
    id.textContent = `record ${record.record_id}`;
    wrap.appendChild(id);
    const replay = document.createElement('a');
    replay.className = 'replay-link';
    replay.href = this.api.differentialUrl(record.session_id);
    replay.textContent = 'replay differential';
    wrap.appendChild(replay);
    wrap.appendChild(renderDifferential(record.differential));
    return wrap;
  }
}
