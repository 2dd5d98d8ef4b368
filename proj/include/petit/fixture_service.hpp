#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "petit/http_manager.hpp"
#include "petit/json_value.hpp"

namespace petit::fixture {

/// Independently switchable implementation errors. All false is the correct
/// tournaments application.
struct FaultFlags {
  bool tournament_delete_returns_null = false;
  bool enrollment_delete_noop = false;
  bool tournament_insert_missing_fields = false;
  bool tournament_update_noop = false;
  bool player_insert_not_stored = false;
  bool player_delete_wrong_player = false;
};

/// In-memory tournaments application: players and tournaments APIs plus an
/// out-of-band admin surface (POST /_admin/faults, POST /_admin/reset).
/// Request handling is serialized by a coarse state lock.
class FixtureService {
 public:
  explicit FixtureService(FaultFlags flags = {});

  HttpResponse handle(apostl::HttpMethod method, const std::string& path,
                      const std::optional<JsonValue>& body);

  /// Clears players, tournaments and enrollments; the tournament id counter
  /// restarts at 1. Fault flags are untouched.
  void reset();

  void set_faults(FaultFlags flags);
  FaultFlags faults() const;

 private:
  struct Player {
    std::string nif;
    JsonValue fields;                      // scalar properties incl. playerNIF
    std::vector<std::int64_t> enrolled;    // tournament ids, insertion order
  };
  struct Tournament {
    std::int64_t id = 0;
    std::optional<std::string> name;       // dropped by the insertion fault
    std::int64_t capacity = 1;
    std::vector<std::string> enrolled;     // player NIFs, insertion order
  };

  Player* find_player(const std::string& nif);
  Tournament* find_tournament(std::int64_t id);
  JsonValue player_json(const Player& p) const;
  JsonValue tournament_json(const Tournament& t) const;

  HttpResponse players_api(apostl::HttpMethod method, const std::vector<std::string>& segs,
                           const std::optional<JsonValue>& body);
  HttpResponse tournaments_api(apostl::HttpMethod method, const std::vector<std::string>& segs,
                               const std::optional<JsonValue>& body);
  HttpResponse enrollments_api(apostl::HttpMethod method, const std::vector<std::string>& segs,
                               const std::optional<JsonValue>& body);
  HttpResponse admin_api(apostl::HttpMethod method, const std::vector<std::string>& segs,
                         const std::optional<JsonValue>& body);

  mutable std::mutex mutex_;
  FaultFlags flags_;
  std::vector<Player> players_;
  std::vector<Tournament> tournaments_;
  std::int64_t next_tournament_id_ = 1;
};

/// Transport that dispatches straight into a FixtureService, round-tripping
/// bodies through the wire form so in-process tests see exactly what a
/// socket client would.
class DirectTransport : public Transport {
 public:
  explicit DirectTransport(FixtureService& service) : service_(service) {}

  HttpResponse send(apostl::HttpMethod method, const std::string& absolute_url,
                    const std::optional<JsonValue>& body) override;

 private:
  FixtureService& service_;
};

/// Records every request passing through; used to audit purity.
class RecordingTransport : public Transport {
 public:
  struct Record {
    apostl::HttpMethod method;
    std::string url;
  };

  explicit RecordingTransport(Transport& inner) : inner_(inner) {}

  HttpResponse send(apostl::HttpMethod method, const std::string& absolute_url,
                    const std::optional<JsonValue>& body) override {
    records_.push_back({method, absolute_url});
    return inner_.send(method, absolute_url, body);
  }

  const std::vector<Record>& records() const { return records_; }
  void clear() { records_.clear(); }

 private:
  Transport& inner_;
  std::vector<Record> records_;
};

/// Serves a FixtureService over HTTP/1.1 on the loopback interface.
class FixtureServer {
 public:
  explicit FixtureServer(FixtureService& service);
  ~FixtureServer();

  /// Binds and starts listening; port 0 picks a free port. Returns the
  /// chosen port.
  int start(int port = 0);
  void stop();

  std::string base_url() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace petit::fixture
