/**
 * DOM rendering for the rating session.
 *
 * Candidate cards show the recommendation value and a 100%-stacked bar
 * of per-layer contributions; a rating field (0 to 1) and a skip toggle
 * sit under each card.  Submit stays disabled until every card is
 * rated or skipped.  After submission the view shows the personal
 * weight vector before and after adaptation and offers the next stage.
 */

import { RecommendationEntry, SessionView } from './api.js';
import { barWidths } from './bars.js';
import { RatingSession } from './session.js';

const LAYER_COLORS = [
  '#4878a8', '#72a0c8', '#a8c8e8', '#6aa84f', '#93c47d', '#b45f06',
  '#e69138', '#f6b26b', '#674ea7', '#8e7cc3', '#b4a7d6',
];

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) {
    node.className = className;
  }
  if (text !== undefined) {
    node.textContent = text;
  }
  return node;
}

export function renderContributionBar(
  doc: Document,
  entry: RecommendationEntry,
  layerKinds: string[],
): HTMLElement {
  const bar = el(doc, 'div', 'contribution-bar');
  const widths = barWidths(entry.layer_contributions);
  widths.forEach((width, index) => {
    if (width <= 0) {
      return;
    }
    const segment = el(doc, 'span', 'contribution-segment');
    segment.style.width = `${width}%`;
    segment.style.backgroundColor = LAYER_COLORS[index % LAYER_COLORS.length] ?? '#999';
    segment.title = `${layerKinds[index] ?? index}: ${width}%`;
    segment.dataset.layer = layerKinds[index] ?? String(index);
    segment.dataset.width = String(width);
    bar.appendChild(segment);
  });
  return bar;
}

export function renderWeightChart(
  doc: Document,
  layerKinds: string[],
  before: number[],
  after: number[],
): HTMLElement {
  const chart = el(doc, 'div', 'weight-chart');
  const peak = Math.max(...before, ...after, 1e-9);
  layerKinds.forEach((kind, index) => {
    const row = el(doc, 'div', 'weight-row');
    row.appendChild(el(doc, 'span', 'weight-label', kind));
    for (const [cls, values] of [['weight-before', before], ['weight-after', after]] as const) {
      const track = el(doc, 'div', 'weight-track');
      const fill = el(doc, 'span', cls);
      const value = values[index] ?? 0;
      fill.style.width = `${(100 * value) / peak}%`;
      fill.dataset.value = value.toFixed(6);
      track.appendChild(fill);
      row.appendChild(track);
    }
    chart.appendChild(row);
  });
  return chart;
}

function renderCard(
  doc: Document,
  session: RatingSession,
  entry: RecommendationEntry,
  layerKinds: string[],
  refresh: () => void,
): HTMLElement {
  const card = el(doc, 'div', 'card');
  card.dataset.candidate = entry.candidate;
  const head = el(doc, 'div', 'card-head');
  head.appendChild(el(doc, 'span', 'candidate', entry.candidate));
  head.appendChild(el(doc, 'span', 'value', entry.value.toFixed(4)));
  card.appendChild(head);
  card.appendChild(renderContributionBar(doc, entry, layerKinds));

  const controls = el(doc, 'div', 'controls');
  const input = el(doc, 'input', 'rating-input') as HTMLInputElement;
  input.type = 'number';
  input.min = '0';
  input.max = '1';
  input.step = '0.1';
  input.placeholder = '0..1';
  const message = el(doc, 'span', 'card-message');
  input.addEventListener('change', () => {
    if (input.value === '') {
      message.textContent = '';
      refresh();
      return;
    }
    const accepted = session.rate(entry.candidate, input.value);
    message.textContent = accepted ? '' : session.error ?? 'invalid rating';
    card.classList.toggle('invalid', !accepted);
    refresh();
  });
  const skip = el(doc, 'button', 'skip', 'skip');
  skip.addEventListener('click', () => {
    session.skip(entry.candidate);
    input.value = '';
    input.disabled = session.isSkipped(entry.candidate);
    message.textContent = session.isSkipped(entry.candidate) ? 'skipped' : '';
    refresh();
  });
  controls.appendChild(input);
  controls.appendChild(skip);
  controls.appendChild(message);
  card.appendChild(controls);
  return card;
}

export function renderSession(
  root: HTMLElement,
  session: RatingSession,
  onSubmitted?: () => void,
): void {
  const doc = root.ownerDocument;
  root.replaceChildren();

  if (session.phase === 'failed') {
    root.appendChild(el(doc, 'div', 'error', session.error ?? 'request failed'));
    return;
  }
  const view = session.view;
  if (session.phase === 'loading' || view === null) {
    root.appendChild(el(doc, 'div', 'loading', 'loading session...'));
    return;
  }

  root.appendChild(el(doc, 'h2', 'stage', `Stage: ${view.stage}`));

  if (session.phase === 'adapted' && session.lastResult) {
    root.appendChild(el(doc, 'p', 'adapted-note',
      'Ratings applied. Personal layer weights before and after:'));
    root.appendChild(renderWeightChart(
      doc, view.layer_kinds, session.lastResult.weights_before,
      session.lastResult.weights_after));
    const next = el(doc, 'button', 'next-stage', 'Show next list');
    next.addEventListener('click', () => {
      void session.advance().then(() => renderSession(root, session, onSubmitted));
    });
    root.appendChild(next);
    return;
  }

  const list = el(doc, 'div', 'cards');
  const submit = el(doc, 'button', 'submit', 'Submit ratings') as HTMLButtonElement;
  const refresh = () => {
    submit.disabled = !session.canSubmit();
  };
  for (const entry of view.presented) {
    list.appendChild(renderCard(doc, session, entry, view.layer_kinds, refresh));
  }
  root.appendChild(list);
  submit.disabled = true;
  submit.addEventListener('click', () => {
    submit.disabled = true;
    void session
      .submit()
      .then(() => {
        renderSession(root, session, onSubmitted);
        onSubmitted?.();
      })
      .catch((err: unknown) => {
        const box = el(doc, 'div', 'error',
          err instanceof Error ? err.message : String(err));
        root.appendChild(box);
        submit.disabled = !session.canSubmit();
      });
  });
  root.appendChild(submit);
}
