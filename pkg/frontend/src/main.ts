import { ApiClient } from './api.js';
import { RatingSession } from './session.js';
import { renderSession } from './render.js';

function boot(): void {
  const root = document.getElementById('app');
  if (!root) {
    throw new Error('missing #app container');
  }
  const params = new URLSearchParams(window.location.search);
  const user = params.get('user');
  if (!user) {
    root.textContent = 'Pass ?user=<id> to start a rating session.';
    return;
  }
  const base = params.get('api') ?? '';
  const session = new RatingSession(new ApiClient(base), user);
  void session.load().then(() => renderSession(root, session));
}

boot();
