import type { ConflictAudit, DifferentialPayload } from './types';
import { PHASES } from './types';

/** Render the ranked differential exactly as the service ordered it.
 *
 * Every number on screen is a service-provided value; this module does no
 * arithmetic beyond formatting (chances to 4 decimals, bar widths straight
 * from the chance).
 */
export function renderDifferential(payload: DifferentialPayload): HTMLElement {
  const container = document.createElement('section');
  container.className = 'differential';

  const summary = document.createElement('p');
  summary.className = 'divisor-note';
  const skipped = PHASES.filter((p) => !payload.phases_performed.includes(p));
  let note = `divisor ${payload.divisor_used} (phases: ${payload.phases_performed.join(' + ')})`;
  if (skipped.length > 0) {
    note += ` — ${skipped.join(', ')} not performed`;
  }
  summary.textContent = note;
  container.appendChild(summary);

  const conflicted = new Set(payload.conflicts.flatMap((c) => c.group));
  const list = document.createElement('ol');
  list.className = 'ranking';
  for (const entry of payload.differential) {
    const item = document.createElement('li');
    item.dataset.disease = entry.disease;
    item.dataset.chance = String(entry.chance);
    if (conflicted.has(entry.disease)) {
      item.classList.add('conflicted');
    }
    const bar = document.createElement('div');
    bar.className = 'chance-bar';
    bar.style.width = `${entry.chance * 100}%`;
    item.appendChild(bar);

    const name = document.createElement('span');
    name.className = 'disease-name';
    name.textContent = entry.display_name;
    item.appendChild(name);

    const chance = document.createElement('span');
    chance.className = 'chance';
    chance.textContent = entry.chance.toFixed(4);
    item.appendChild(chance);

    for (const phase of payload.phases_performed) {
      const cls = entry.match_class_per_phase[phase];
      if (!cls) continue;
      const badge = document.createElement('span');
      badge.className = `badge badge-${cls}`;
      badge.dataset.phase = phase;
      badge.textContent = `${phase}: ${cls}`;
      item.appendChild(badge);
    }
    list.appendChild(item);
  }
  container.appendChild(list);

  if (payload.conflicts.length > 0) {
    container.appendChild(renderAuditPanel(payload.conflicts));
  }
  return container;
}

function renderAuditPanel(conflicts: ConflictAudit[]): HTMLElement {
  const panel = document.createElement('aside');
  panel.className = 'audit-panel';
  const title = document.createElement('h3');
  title.textContent = 'Conflict resolution';
  panel.appendChild(title);
  for (const conflict of conflicts) {
    const block = document.createElement('div');
    block.className = conflict.resolved ? 'audit resolved' : 'audit unresolved';
    const heading = document.createElement('p');
    heading.textContent = `tied group: ${conflict.group.join(', ')}`;
    block.appendChild(heading);
    if (conflict.resolved && conflict.joints && conflict.order) {
      const joints = document.createElement('ul');
      joints.className = 'joints';
      for (const disease of conflict.order) {
        const li = document.createElement('li');
        li.dataset.disease = disease;
        li.dataset.joint = String(conflict.joints[disease]);
        li.textContent = `${disease}: joint ${conflict.joints[disease]}`;
        joints.appendChild(li);
      }
      block.appendChild(joints);
      const order = document.createElement('p');
      order.className = 'resolved-order';
      order.textContent = `resolved order: ${conflict.order.join(' > ')}`;
      if (conflict.tie) {
        order.textContent += ' (joints tie; original order kept)';
      }
      block.appendChild(order);
    } else {
      const why = document.createElement('p');
      why.className = 'unresolved-reason';
      why.textContent = `unresolved: ${conflict.reason ?? 'probability tables unavailable'}`;
      block.appendChild(why);
    }
    panel.appendChild(block);
  }
  return panel;
}
