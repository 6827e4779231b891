// SPDX-License-Identifier: Apache-2.0
// Browser client. The server state frame is authoritative: every reconnect
// replaces the local view with /state and then applies pushed frames.
'use strict';

const $ = (id) => document.getElementById(id);
let session = null;
let view = null;
let socket = null;
let retry = 500;

async function api(method, path, body) {
  const res = await fetch(path, {
    method,
    headers: { 'Content-Type': 'application/json' },
    body: body ? JSON.stringify(body) : undefined,
  });
  const data = await res.json().catch(() => ({}));
  if (!res.ok) throw new Error(data.message || data.code || res.statusText);
  return data;
}

function hms(ms) {
  return new Date(ms).toISOString().substring(11, 19);
}

function render() {
  if (!view) return;
  $('me').textContent = `${view.me.name} (${view.me.role || 'waiting'})` +
    (view.me.teammates ? ` with ${view.me.teammates.join(', ')}` : '');
  if (view.phase) {
    const left = Math.max(0, Math.round((view.phase.deadline - Date.now()) / 1000));
    $('phase').textContent = `${view.phase.kind} ${view.phase.index}, ${left}s left`;
  } else {
    $('phase').textContent = view.outcome && view.outcome !== 'Ongoing' ? view.outcome : `lobby ${view.joined}/${view.roster_size}`;
  }
  $('players').replaceChildren(...view.players.map((p) => {
    const li = document.createElement('li');
    li.textContent = p.name + (p.role ? ` (${p.role})` : '');
    if (!p.alive) li.className = 'dead';
    if (p.alive && p.name !== view.me.name) li.onclick = () => send({ type: 'cast_vote', target: p.name });
    return li;
  }));
  $('votes').replaceChildren(...Object.entries(view.vote_counts || {}).map(([name, n]) => {
    const li = document.createElement('li');
    li.textContent = `${name}: ${n}`;
    return li;
  }));
  $('log').replaceChildren(...view.messages.map((m) => {
    const div = document.createElement('div');
    div.textContent = `[${hms(m.ts)}] ${m.author}: ${m.content}`;
    if (m.scope === 'System') div.className = 'sys';
    if (m.scope === 'NighttimeMafia') div.className = 'mafia';
    return div;
  }));
  $('log').scrollTop = $('log').scrollHeight;
  renderSurvey();
}

function renderSurvey() {
  const box = $('survey');
  const stage = view.survey ? view.survey.stage : 'none';
  box.classList.toggle('hidden', stage === 'none');
  if (stage === 'guess') {
    box.innerHTML = '<p>Which player was the AI?</p>';
    for (const p of view.players) {
      if (p.name === view.me.name) continue;
      const b = document.createElement('button');
      b.textContent = p.name;
      b.onclick = () => send({ type: 'survey_submit', stage: 'guess', guess: p.name });
      box.appendChild(b);
    }
  } else if (stage === 'scores') {
    box.innerHTML = `<p>The AI was ${(view.agent_names || []).join(', ')}. Rate it from 1 to 5.</p>` +
      ['human_similarity', 'timing', 'relevance']
        .map((k) => `<label>${k} <input type="number" min="1" max="5" id="s-${k}"></label>`).join(' ') +
      ' <button id="s-go">Submit</button>';
    $('s-go').onclick = () => {
      const frame = { type: 'survey_submit', stage: 'scores' };
      for (const k of ['human_similarity', 'timing', 'relevance']) {
        const v = parseInt($(`s-${k}`).value, 10);
        if (v) frame[k] = v;
      }
      send(frame);
    };
  } else {
    box.textContent = { await_reveal: 'Waiting for the other players.', done: 'Thanks!', closed: 'Survey closed.' }[stage] || '';
  }
}

function adopt(state) {
  view = state;
  view.players = view.players || [];
  view.messages = view.messages || [];
  const votes = view.votes || [];
  view.vote_counts = votes.length ? votes[votes.length - 1].counts : {};
}

async function resync() {
  adopt(await api('GET', `/api/games/${session.game}/state?token=${encodeURIComponent(session.token)}`));
  render();
}

function apply(frame) {
  switch (frame.type) {
    case 'state':
      adopt(frame);
      break;
    case 'message':
      view.messages.push(frame);
      break;
    case 'vote_update':
      view.vote_counts = frame.counts;
      break;
    case 'phase_event':
    case 'reveal':
    case 'role_packet':
    case 'survey_ack':
      // Phase edges change several fields at once; pull the full view.
      resync();
      return;
    case 'error':
      alert(`${frame.code}: ${frame.message}`);
      return;
  }
  render();
}

function connect() {
  const proto = location.protocol === 'https:' ? 'wss' : 'ws';
  socket = new WebSocket(`${proto}://${location.host}/ws?game=${session.game}&token=${encodeURIComponent(session.token)}`);
  socket.onopen = () => { retry = 500; };
  socket.onmessage = (ev) => apply(JSON.parse(ev.data));
  socket.onclose = () => {
    setTimeout(() => { resync().catch(() => {}); connect(); }, retry);
    retry = Math.min(retry * 2, 10000);
  };
}

function send(frame) {
  if (socket && socket.readyState === WebSocket.OPEN) socket.send(JSON.stringify(frame));
}

$('say').onsubmit = (ev) => {
  ev.preventDefault();
  const text = $('text').value.trim();
  if (text) send({ type: 'send_message', content: text });
  $('text').value = '';
};

$('join-btn').onclick = async () => {
  try {
    const game = $('game-id').value.trim();
    const r = await api('POST', `/api/games/${game}/join`, {
      participant_id: $('participant').value.trim(),
      consent: $('consent').checked,
    });
    session = { game, token: r.token };
    $('join').classList.add('hidden');
    $('side').classList.remove('hidden');
    $('main').classList.remove('hidden');
    await resync();
    connect();
    setInterval(render, 1000);
  } catch (e) {
    $('join-error').textContent = e.message;
  }
};

api('GET', '/api/consent').then((c) => { $('consent-text').textContent = c.text; }).catch(() => {});
const params = new URLSearchParams(location.search);
if (params.get('game')) $('game-id').value = params.get('game');
