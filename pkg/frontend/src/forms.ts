import type { Catalog, Findings, PhaseName } from './types';

export interface FormControl {
  attribute: string;
  multiValued: boolean;
  options: string[];
}

export interface PhaseFormModel {
  phase: PhaseName;
  controls: FormControl[];
}

/** Derive the form for one phase from the service catalog: one control per
 * catalog attribute of that phase, offering exactly its legal tokens. */
export function buildPhaseForm(catalog: Catalog, phase: PhaseName): PhaseFormModel {
  return {
    phase,
    controls: catalog.attributes
      .filter((a) => a.phase === phase)
      .map((a) => ({
        attribute: a.id,
        multiValued: a.multi_valued,
        options: [...a.allowed_values],
      })),
  };
}

function labelize(token: string): string {
  return token.replace(/_/g, ' ');
}

export function renderPhaseForm(model: PhaseFormModel, prefill?: Findings): HTMLElement {
  const form = document.createElement('form');
  form.className = 'phase-form';
  form.dataset.phase = model.phase;
  for (const control of model.controls) {
    const field = document.createElement('fieldset');
    field.dataset.attribute = control.attribute;
    const legend = document.createElement('legend');
    legend.textContent = labelize(control.attribute);
    field.appendChild(legend);
    const selected = new Set(prefill?.[control.attribute] ?? []);
    if (control.multiValued) {
      for (const option of control.options) {
        const label = document.createElement('label');
        const box = document.createElement('input');
        box.type = 'checkbox';
        box.name = control.attribute;
        box.value = option;
        box.checked = selected.has(option);
        label.appendChild(box);
        label.appendChild(document.createTextNode(labelize(option)));
        field.appendChild(label);
      }
    } else {
      const select = document.createElement('select');
      select.name = control.attribute;
      const blank = document.createElement('option');
      blank.value = '';
      blank.textContent = '(no finding)';
      select.appendChild(blank);
      for (const option of control.options) {
        const el = document.createElement('option');
        el.value = option;
        el.textContent = labelize(option);
        select.appendChild(el);
      }
      const preset = control.options.find((o) => selected.has(o));
      select.value = preset ?? '';
      field.appendChild(select);
    }
    form.appendChild(field);
  }
  return form;
}

/** Collect selected tokens; attributes without a selection are omitted, so
 * the service sees exactly what the clinician entered. */
export function readFindings(form: HTMLElement, model: PhaseFormModel): Findings {
  const findings: Findings = {};
  for (const control of model.controls) {
    if (control.multiValued) {
      const boxes = form.querySelectorAll<HTMLInputElement>(
        `input[name="${control.attribute}"]:checked`
      );
      const tokens = Array.from(boxes, (b) => b.value);
      if (tokens.length > 0) {
        findings[control.attribute] = tokens;
      }
    } else {
      const select = form.querySelector<HTMLSelectElement>(
        `select[name="${control.attribute}"]`
      );
      if (select && select.value) {
        findings[control.attribute] = [select.value];
      }
    }
  }
  return findings;
}
