import { describe, expect, it } from 'vitest';

import { buildPhaseForm, readFindings, renderPhaseForm } from '../src/forms';
import { CATALOG } from './fixtures';

describe('buildPhaseForm', () => {
  it('offers exactly the catalog attributes of the phase', () => {
    const model = buildPhaseForm(CATALOG, 'history');
    expect(model.controls.map((c) => c.attribute)).toEqual([
      'site_of_pain',
      'pain_at_rest',
    ]);
  });

  it('offers exactly the catalog-legal tokens', () => {
    const model = buildPhaseForm(CATALOG, 'examination');
    expect(model.controls).toHaveLength(1);
    expect(model.controls[0].options).toEqual(['normal', 'positive']);
  });

  it('carries multi-valuedness through', () => {
    const model = buildPhaseForm(CATALOG, 'history');
    expect(model.controls[0].multiValued).toBe(true);
    expect(model.controls[1].multiValued).toBe(false);
  });
});

describe('renderPhaseForm', () => {
  it('renders checkboxes for multi-valued attributes and selects otherwise', () => {
    const model = buildPhaseForm(CATALOG, 'history');
    const form = renderPhaseForm(model);
    const boxes = form.querySelectorAll('input[type="checkbox"][name="site_of_pain"]');
    expect(boxes).toHaveLength(3);
    const select = form.querySelector<HTMLSelectElement>('select[name="pain_at_rest"]');
    expect(select).not.toBeNull();
    // blank "(no finding)" option plus the legal tokens, nothing else
    expect(Array.from(select!.options).map((o) => o.value)).toEqual(['', 'yes', 'no']);
  });

  it('prefills from stored findings', () => {
    const model = buildPhaseForm(CATALOG, 'history');
    const form = renderPhaseForm(model, {
      site_of_pain: ['low_back', 'leg'],
      pain_at_rest: ['no'],
    });
    const checked = Array.from(
      form.querySelectorAll<HTMLInputElement>('input[name="site_of_pain"]:checked'),
      (b) => b.value
    );
    expect(checked).toEqual(['low_back', 'leg']);
    expect(form.querySelector<HTMLSelectElement>('select[name="pain_at_rest"]')!.value).toBe('no');
  });
});

describe('readFindings', () => {
  it('returns selected tokens and omits untouched attributes', () => {
    const model = buildPhaseForm(CATALOG, 'history');
    const form = renderPhaseForm(model);
    const box = form.querySelector<HTMLInputElement>(
      'input[name="site_of_pain"][value="buttock"]'
    )!;
    box.checked = true;
    expect(readFindings(form, model)).toEqual({ site_of_pain: ['buttock'] });
  });

  it('round-trips a prefilled form', () => {
    const model = buildPhaseForm(CATALOG, 'history');
    const findings = { site_of_pain: ['low_back'], pain_at_rest: ['yes'] };
    const form = renderPhaseForm(model, findings);
    expect(readFindings(form, model)).toEqual(findings);
  });

  it('reads an empty form as no findings at all', () => {
    const model = buildPhaseForm(CATALOG, 'examination');
    const form = renderPhaseForm(model);
    expect(readFindings(form, model)).toEqual({});
  });
});
