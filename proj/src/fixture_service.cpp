#include "petit/fixture_service.hpp"

#include <algorithm>
#include <thread>

#include <httplib.h>

namespace petit::fixture {

using apostl::HttpMethod;

namespace {

HttpResponse json_response(int code, const JsonValue& body) {
  return HttpResponse::from_raw(code, to_wire(body));
}

HttpResponse message_response(int code, const std::string& message) {
  return json_response(code, JsonValue::object({{"message", JsonValue::str(message)}}));
}

HttpResponse not_found_player(const std::string& nif) {
  return message_response(404, "Player with NIF " + nif + " not found.");
}

HttpResponse not_found_tournament(const std::string& id) {
  return message_response(404, "Tournament with id " + id + " not found.");
}

std::vector<std::string> split_segments(const std::string& path) {
  std::vector<std::string> segs;
  std::size_t i = 0;
  while (i < path.size()) {
    if (path[i] == '/') {
      ++i;
      continue;
    }
    std::size_t j = path.find('/', i);
    if (j == std::string::npos) j = path.size();
    segs.push_back(path.substr(i, j - i));
    i = j;
  }
  return segs;
}

std::optional<std::int64_t> parse_id(const std::string& raw) {
  if (raw.empty()) return std::nullopt;
  std::int64_t value = 0;
  for (char c : raw) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    value = value * 10 + (c - '0');
  }
  return value;
}

const std::string* body_string(const std::optional<JsonValue>& body, const char* key) {
  if (!body || !body->is_object()) return nullptr;
  const JsonValue* v = body->find(key);
  if (v == nullptr || !v->is_string()) return nullptr;
  return &v->as_string();
}

}  // namespace

FixtureService::FixtureService(FaultFlags flags) : flags_(flags) {}

void FixtureService::reset() {
  std::lock_guard lock(mutex_);
  players_.clear();
  tournaments_.clear();
  next_tournament_id_ = 1;
}

void FixtureService::set_faults(FaultFlags flags) {
  std::lock_guard lock(mutex_);
  flags_ = flags;
}

FaultFlags FixtureService::faults() const {
  std::lock_guard lock(mutex_);
  return flags_;
}

FixtureService::Player* FixtureService::find_player(const std::string& nif) {
  for (auto& p : players_) {
    if (p.nif == nif) return &p;
  }
  return nullptr;
}

FixtureService::Tournament* FixtureService::find_tournament(std::int64_t id) {
  for (auto& t : tournaments_) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

JsonValue FixtureService::player_json(const Player& p) const {
  JsonValue out = p.fields;
  JsonValue::Array tournaments;
  for (std::int64_t id : p.enrolled) {
    for (const auto& t : tournaments_) {
      if (t.id != id) continue;
      // nested summaries keep the players collection empty to stay acyclic
      JsonValue::Object summary;
      summary.emplace_back("tournamentId", JsonValue::integer(t.id));
      if (t.name) summary.emplace_back("tournamentName", JsonValue::str(*t.name));
      summary.emplace_back("capacity", JsonValue::integer(t.capacity));
      summary.emplace_back("playerNumber", JsonValue::integer(0));
      summary.emplace_back("players", JsonValue::array());
      tournaments.push_back(JsonValue::object(std::move(summary)));
    }
  }
  out.set("tournaments", JsonValue::array(std::move(tournaments)));
  return out;
}

JsonValue FixtureService::tournament_json(const Tournament& t) const {
  JsonValue::Object out;
  out.emplace_back("tournamentId", JsonValue::integer(t.id));
  if (t.name) out.emplace_back("tournamentName", JsonValue::str(*t.name));
  out.emplace_back("capacity", JsonValue::integer(t.capacity));
  out.emplace_back("playerNumber", JsonValue::integer(static_cast<std::int64_t>(t.enrolled.size())));
  JsonValue::Array players;
  for (const auto& nif : t.enrolled) {
    for (const auto& p : players_) {
      if (p.nif != nif) continue;
      JsonValue summary = p.fields;
      summary.set("tournaments", JsonValue::array());
      players.push_back(std::move(summary));
    }
  }
  out.emplace_back("players", JsonValue::array(std::move(players)));
  return JsonValue::object(std::move(out));
}

HttpResponse FixtureService::handle(HttpMethod method, const std::string& path,
                                    const std::optional<JsonValue>& body) {
  std::lock_guard lock(mutex_);
  const auto segs = split_segments(path);
  if (segs.empty()) return message_response(404, "Not found.");
  if (segs[0] == "players") return players_api(method, segs, body);
  if (segs[0] == "tournaments") {
    if (segs.size() >= 3 && segs[2] == "enrollments") return enrollments_api(method, segs, body);
    return tournaments_api(method, segs, body);
  }
  if (segs[0] == "_admin") return admin_api(method, segs, body);
  return message_response(404, "Not found.");
}

HttpResponse FixtureService::players_api(HttpMethod method, const std::vector<std::string>& segs,
                                         const std::optional<JsonValue>& body) {
  if (segs.size() == 1) {
    if (method == HttpMethod::Get) {
      JsonValue::Array all;
      for (const auto& p : players_) all.push_back(player_json(p));
      return json_response(200, JsonValue::array(std::move(all)));
    }
    if (method == HttpMethod::Post) {
      const std::string* nif = body_string(body, "playerNIF");
      if (nif == nullptr) return message_response(400, "A player requires a playerNIF.");
      if (find_player(*nif) != nullptr) {
        return message_response(409, "Player with NIF " + *nif + " already exists.");
      }
      Player p;
      p.nif = *nif;
      JsonValue::Object fields;
      for (const auto& [key, value] : body->as_object()) {
        if (key == "tournaments") continue;  // enrollment is server-managed
        fields.emplace_back(key, value);
      }
      p.fields = JsonValue::object(std::move(fields));
      const JsonValue echo = player_json(p);
      if (!flags_.player_insert_not_stored) players_.push_back(std::move(p));
      return json_response(200, echo);
    }
    return message_response(404, "Not found.");
  }

  const std::string& nif = segs[1];
  Player* player = find_player(nif);

  if (segs.size() == 2) {
    switch (method) {
      case HttpMethod::Get:
        if (player == nullptr) return not_found_player(nif);
        return json_response(200, player_json(*player));
      case HttpMethod::Put: {
        if (player == nullptr) return not_found_player(nif);
        if (!body || !body->is_object()) return message_response(400, "Malformed player body.");
        for (const auto& [key, value] : body->as_object()) {
          if (key == "tournaments" || key == "playerNIF") continue;
          player->fields.set(key, value);
        }
        return json_response(200, player_json(*player));
      }
      case HttpMethod::Delete: {
        if (player == nullptr) return not_found_player(nif);
        if (flags_.player_delete_wrong_player) {
          Player* victim = nullptr;
          for (auto& candidate : players_) {
            if (candidate.nif != nif) {
              victim = &candidate;
              break;
            }
          }
          if (victim == nullptr) {
            // sole stored player: nothing is deleted, a phantom is echoed
            JsonValue::Object phantom;
            std::string other = nif;
            other[0] = other[0] == '1' ? '2' : '1';
            phantom.emplace_back("playerNIF", JsonValue::str(other));
            phantom.emplace_back("firstName", JsonValue::str("phantom"));
            phantom.emplace_back("lastName", JsonValue::str("phantom"));
            phantom.emplace_back("address", JsonValue::str(""));
            phantom.emplace_back("email", JsonValue::str(""));
            phantom.emplace_back("phone", JsonValue::str(""));
            phantom.emplace_back("tournaments", JsonValue::array());
            return json_response(200, JsonValue::object(std::move(phantom)));
          }
          const JsonValue echo = player_json(*victim);
          const std::string victim_nif = victim->nif;
          for (auto& t : tournaments_) {
            std::erase(t.enrolled, victim_nif);
          }
          std::erase_if(players_, [&](const Player& p) { return p.nif == victim_nif; });
          return json_response(200, echo);
        }
        const JsonValue echo = player_json(*player);
        for (auto& t : tournaments_) {
          std::erase(t.enrolled, nif);
        }
        std::erase_if(players_, [&](const Player& p) { return p.nif == nif; });
        return json_response(200, echo);
      }
      default:
        return message_response(404, "Not found.");
    }
  }

  if (segs.size() == 3 && segs[2] == "enrollments" && method == HttpMethod::Get) {
    if (player == nullptr) return not_found_player(nif);
    const JsonValue full = player_json(*player);
    return json_response(200, *full.find("tournaments"));
  }
  return message_response(404, "Not found.");
}

HttpResponse FixtureService::tournaments_api(HttpMethod method,
                                             const std::vector<std::string>& segs,
                                             const std::optional<JsonValue>& body) {
  if (segs.size() == 1) {
    if (method == HttpMethod::Get) {
      JsonValue::Array all;
      for (const auto& t : tournaments_) all.push_back(tournament_json(t));
      return json_response(200, JsonValue::array(std::move(all)));
    }
    if (method == HttpMethod::Post) {
      const std::string* name = body_string(body, "tournamentName");
      const JsonValue* capacity = body && body->is_object() ? body->find("capacity") : nullptr;
      if (name == nullptr || capacity == nullptr || !capacity->is_int() || capacity->as_int() < 1) {
        return message_response(400,
                                "A tournament requires a tournamentName and a capacity of at least 1.");
      }
      Tournament t;
      t.id = next_tournament_id_++;
      if (!flags_.tournament_insert_missing_fields) t.name = *name;
      t.capacity = capacity->as_int();
      tournaments_.push_back(t);
      return json_response(200, tournament_json(tournaments_.back()));
    }
    return message_response(404, "Not found.");
  }

  const auto id = parse_id(segs[1]);
  Tournament* tournament = id ? find_tournament(*id) : nullptr;
  if (tournament == nullptr) return not_found_tournament(segs[1]);

  if (segs.size() == 2) {
    switch (method) {
      case HttpMethod::Get:
        return json_response(200, tournament_json(*tournament));
      case HttpMethod::Put: {
        if (!body || !body->is_object()) return message_response(400, "Malformed tournament body.");
        if (flags_.tournament_update_noop) {
          return json_response(200, tournament_json(*tournament));
        }
        if (const std::string* name = body_string(body, "tournamentName")) {
          tournament->name = *name;
        }
        if (const JsonValue* capacity = body->find("capacity");
            capacity != nullptr && capacity->is_int() && capacity->as_int() >= 1) {
          tournament->capacity = capacity->as_int();
        }
        return json_response(200, tournament_json(*tournament));
      }
      case HttpMethod::Delete: {
        const JsonValue echo = tournament_json(*tournament);
        const std::int64_t gone = tournament->id;
        for (auto& p : players_) {
          std::erase(p.enrolled, gone);
        }
        std::erase_if(tournaments_, [&](const Tournament& t) { return t.id == gone; });
        if (flags_.tournament_delete_returns_null) {
          return HttpResponse::from_raw(200, "null");
        }
        return json_response(200, echo);
      }
      default:
        return message_response(404, "Not found.");
    }
  }

  if (segs.size() == 3 && segs[2] == "capacity" && method == HttpMethod::Get) {
    return HttpResponse::from_raw(200, std::to_string(tournament->capacity));
  }
  return message_response(404, "Not found.");
}

HttpResponse FixtureService::enrollments_api(HttpMethod method,
                                             const std::vector<std::string>& segs,
                                             const std::optional<JsonValue>& body) {
  const auto id = parse_id(segs[1]);
  Tournament* tournament = id ? find_tournament(*id) : nullptr;

  if (segs.size() == 3) {
    if (tournament == nullptr) return not_found_tournament(segs[1]);
    if (method == HttpMethod::Get) {
      return json_response(200, *tournament_json(*tournament).find("players"));
    }
    if (method == HttpMethod::Post) {
      const std::string* nif = body_string(body, "playerNIF");
      if (nif == nullptr) return message_response(400, "An enrollment requires a playerNIF.");
      Player* player = find_player(*nif);
      if (player == nullptr) return not_found_player(*nif);
      if (std::find(tournament->enrolled.begin(), tournament->enrolled.end(), *nif) !=
          tournament->enrolled.end()) {
        return message_response(409, "Player with NIF " + *nif + " is already enrolled in the tournament " +
                                         std::to_string(tournament->id) + ".");
      }
      if (static_cast<std::int64_t>(tournament->enrolled.size()) >= tournament->capacity) {
        return message_response(409,
                                "Tournament " + std::to_string(tournament->id) + " is full.");
      }
      tournament->enrolled.push_back(*nif);
      player->enrolled.push_back(tournament->id);
      return json_response(200, player_json(*player));
    }
    return message_response(404, "Not found.");
  }

  if (segs.size() == 4) {
    const std::string& nif = segs[3];
    if (method == HttpMethod::Delete && flags_.enrollment_delete_noop) {
      // buggy handler: skips the player and enrollment checks and never
      // removes anything, acknowledging with 200 as long as the tournament
      // exists
      if (tournament == nullptr) return not_found_tournament(segs[1]);
      Player* player = find_player(nif);
      const bool enrolled =
          std::find(tournament->enrolled.begin(), tournament->enrolled.end(), nif) !=
          tournament->enrolled.end();
      if (player != nullptr && enrolled) {
        JsonValue summary = player->fields;
        summary.set("tournaments", JsonValue::array());
        return json_response(200, summary);
      }
      return json_response(200, JsonValue::object({{"tournamentId", JsonValue::integer(*id)},
                                                   {"playerNIF", JsonValue::str(nif)}}));
    }
    if (tournament == nullptr) return not_found_tournament(segs[1]);
    Player* player = find_player(nif);
    if (player == nullptr) {
      return message_response(404, "Player with NIF " + nif + " does not exist.");
    }
    const bool enrolled =
        std::find(tournament->enrolled.begin(), tournament->enrolled.end(), nif) !=
        tournament->enrolled.end();
    if (!enrolled) {
      return message_response(404, "Player with NIF " + nif + " is not enrolled in the tournament " +
                                       std::to_string(tournament->id) + ".");
    }
    JsonValue summary = player->fields;
    summary.set("tournaments", JsonValue::array());
    if (method == HttpMethod::Get) {
      return json_response(200, summary);
    }
    if (method == HttpMethod::Delete) {
      std::erase(tournament->enrolled, nif);
      std::erase(player->enrolled, tournament->id);
      return json_response(200, summary);
    }
  }
  return message_response(404, "Not found.");
}

HttpResponse FixtureService::admin_api(HttpMethod method, const std::vector<std::string>& segs,
                                       const std::optional<JsonValue>& body) {
  if (method != HttpMethod::Post || segs.size() != 2) {
    return message_response(404, "Not found.");
  }
  if (segs[1] == "reset") {
    players_.clear();
    tournaments_.clear();
    next_tournament_id_ = 1;
    return json_response(200, JsonValue::object());
  }
  if (segs[1] == "faults") {
    if (!body || !body->is_object()) return message_response(400, "Expected a flag map.");
    auto flag = [&](const char* key, bool current) {
      const JsonValue* v = body->find(key);
      return v != nullptr && v->is_bool() ? v->as_bool() : current;
    };
    flags_.tournament_delete_returns_null =
        flag("tournament_delete_returns_null", flags_.tournament_delete_returns_null);
    flags_.enrollment_delete_noop = flag("enrollment_delete_noop", flags_.enrollment_delete_noop);
    flags_.tournament_insert_missing_fields =
        flag("tournament_insert_missing_fields", flags_.tournament_insert_missing_fields);
    flags_.tournament_update_noop = flag("tournament_update_noop", flags_.tournament_update_noop);
    flags_.player_insert_not_stored =
        flag("player_insert_not_stored", flags_.player_insert_not_stored);
    flags_.player_delete_wrong_player =
        flag("player_delete_wrong_player", flags_.player_delete_wrong_player);
    return json_response(200, JsonValue::object());
  }
  return message_response(404, "Not found.");
}

HttpResponse DirectTransport::send(HttpMethod method, const std::string& absolute_url,
                                   const std::optional<JsonValue>& body) {
  const auto scheme_end = absolute_url.find("://");
  std::string path = absolute_url;
  if (scheme_end != std::string::npos) {
    const auto path_start = absolute_url.find('/', scheme_end + 3);
    path = path_start == std::string::npos ? "/" : absolute_url.substr(path_start);
  }
  std::optional<JsonValue> wire_body;
  if (body) wire_body = parse_json(to_wire(*body));
  return service_.handle(method, path, wire_body);
}

struct FixtureServer::Impl {
  explicit Impl(FixtureService& svc) : service(svc) {}

  FixtureService& service;
  httplib::Server server;
  std::thread thread;
  int port = 0;
};

FixtureServer::FixtureServer(FixtureService& service) : impl_(std::make_unique<Impl>(service)) {
  auto dispatch = [this](apostl::HttpMethod method) {
    return [this, method](const httplib::Request& req, httplib::Response& res) {
      std::optional<JsonValue> body;
      if (!req.body.empty()) {
        body = parse_json(req.body);
        if (!body) {
          res.status = 400;
          res.set_content(R"({"message": "Malformed JSON body."})", "application/json");
          return;
        }
      }
      const HttpResponse out = impl_->service.handle(method, req.path, body);
      res.status = out.code;
      res.set_content(out.raw_text, "application/json");
    };
  };
  impl_->server.Get(".*", dispatch(HttpMethod::Get));
  impl_->server.Post(".*", dispatch(HttpMethod::Post));
  impl_->server.Put(".*", dispatch(HttpMethod::Put));
  impl_->server.Delete(".*", dispatch(HttpMethod::Delete));
}

FixtureServer::~FixtureServer() { stop(); }

int FixtureServer::start(int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port("127.0.0.1");
  } else {
    impl_->server.bind_to_port("127.0.0.1", port);
    impl_->port = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void FixtureServer::stop() {
  if (impl_->thread.joinable()) {
    impl_->server.stop();
    impl_->thread.join();
  }
}

std::string FixtureServer::base_url() const {
  return "http://127.0.0.1:" + std::to_string(impl_->port);
}

}  // namespace petit::fixture
