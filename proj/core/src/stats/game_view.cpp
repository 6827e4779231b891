// SPDX-License-Identifier: Apache-2.0
#include "amafia/stats/game_view.hpp"

namespace amafia::stats {

std::string_view to_string(PlayerType t) noexcept { return t == PlayerType::Llm ? "llm" : "human"; }

const ViewPlayer* GameView::player(const PlayerId& id) const {
  for (const auto& p : players)
    if (p.id == id) return &p;
  return nullptr;
}

GameView build_view(const GameLog& log) {
  GameView v;
  v.game_id = log.header.game_id;
  std::set<PlayerId> alive;
  for (const auto& r : log.header.roster) {
    v.players.push_back({r.id, r.character_name, r.role, r.is_agent ? PlayerType::Llm : PlayerType::Human});
    alive.insert(r.id);
  }

  for (const auto& rec : log.events) {
    if (const auto* m = rec.as<MessageEvent>()) {
      if (m->message.from_game_manager()) continue;
      v.messages.push_back({m->message.timestamp, m->message.author, m->message.scope, m->message.phase_index,
                            m->message.content});
    } else if (const auto* p = rec.as<PhaseEvent>()) {
      if (p->edge == PhaseEvent::Edge::Start) v.phases.push_back({p->phase_index, p->kind, alive, std::nullopt});
    } else if (const auto* e = rec.as<EliminationEvent>()) {
      alive.erase(e->player);
      for (auto it = v.phases.rbegin(); it != v.phases.rend(); ++it)
        if (it->index == e->phase_index && it->kind == e->kind) {
          it->eliminated = e->player;
          break;
        }
    } else if (const auto* o = rec.as<OutcomeEvent>()) {
      v.outcome = o->outcome;
    } else if (const auto* s = rec.as<SurveyEvent>()) {
      v.survey.push_back(s->response);
    }
  }
  return v;
}

}  // namespace amafia::stats
