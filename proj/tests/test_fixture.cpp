#include <doctest.h>

#include "petit/fixture_service.hpp"
#include "petit/http_manager.hpp"

using namespace petit;
using namespace petit::fixture;
using apostl::HttpMethod;

namespace {

JsonValue player_body(const std::string& nif, const std::string& first = "ana") {
  return JsonValue::object({
      {"playerNIF", JsonValue::str(nif)},
      {"firstName", JsonValue::str(first)},
      {"lastName", JsonValue::str("ribeiro")},
      {"address", JsonValue::str("rua 1")},
      {"email", JsonValue::str("ana@ana.ana")},
      {"phone", JsonValue::str("999999999")},
      {"tournaments", JsonValue::array()},
  });
}

JsonValue tournament_body(const std::string& name, std::int64_t capacity) {
  return JsonValue::object({
      {"tournamentName", JsonValue::str(name)},
      {"capacity", JsonValue::integer(capacity)},
      {"players", JsonValue::array()},
  });
}

}  // namespace

TEST_CASE("post then get returns the stored player with empty tournaments") {
  FixtureService svc;
  const auto post = svc.handle(HttpMethod::Post, "/players", player_body("100123123"));
  CHECK(post.code == 200);
  const auto get = svc.handle(HttpMethod::Get, "/players/100123123", std::nullopt);
  REQUIRE(get.code == 200);
  REQUIRE(get.body.has_value());
  CHECK(get.body->find("firstName")->as_string() == "ana");
  CHECK(get.body->find("tournaments")->as_array().empty());
  CHECK(masked_equals(*post.body, *get.body));
}

TEST_CASE("missing resources use the expected message shapes") {
  FixtureService svc;
  const auto player = svc.handle(HttpMethod::Get, "/players/000000000", std::nullopt);
  CHECK(player.code == 404);
  CHECK(*player.message == "Player with NIF 000000000 not found.");
  const auto tournament = svc.handle(HttpMethod::Get, "/tournaments/7", std::nullopt);
  CHECK(tournament.code == 404);
  CHECK(*tournament.message == "Tournament with id 7 not found.");
}

TEST_CASE("empty collections list as empty arrays") {
  FixtureService svc;
  const auto players = svc.handle(HttpMethod::Get, "/players", std::nullopt);
  CHECK(players.code == 200);
  CHECK(players.body->as_array().empty());
}

TEST_CASE("tournament ids are server-assigned and increase") {
  FixtureService svc;
  const auto a = svc.handle(HttpMethod::Post, "/tournaments", tournament_body("A", 3));
  const auto b = svc.handle(HttpMethod::Post, "/tournaments", tournament_body("B", 3));
  CHECK(a.body->find("tournamentId")->as_int() == 1);
  CHECK(b.body->find("tournamentId")->as_int() == 2);
  CHECK(a.body->find("playerNumber")->as_int() == 0);
}

TEST_CASE("enrollment lifecycle with capacity limit") {
  FixtureService svc;
  svc.handle(HttpMethod::Post, "/tournaments", tournament_body("Cup", 1));
  svc.handle(HttpMethod::Post, "/players", player_body("100000001"));
  svc.handle(HttpMethod::Post, "/players", player_body("100000002", "bea"));

  const auto unenrolled =
      svc.handle(HttpMethod::Get, "/tournaments/1/enrollments/100000001", std::nullopt);
  CHECK(unenrolled.code == 404);
  CHECK(*unenrolled.message == "Player with NIF 100000001 is not enrolled in the tournament 1.");

  const auto enroll = svc.handle(HttpMethod::Post, "/tournaments/1/enrollments",
                                 JsonValue::object({{"playerNIF", JsonValue::str("100000001")}}));
  CHECK(enroll.code == 200);

  // capacity 1 is now exhausted
  const auto full = svc.handle(HttpMethod::Post, "/tournaments/1/enrollments",
                               JsonValue::object({{"playerNIF", JsonValue::str("100000002")}}));
  CHECK(full.code == 409);

  const auto capacity = svc.handle(HttpMethod::Get, "/tournaments/1/capacity", std::nullopt);
  CHECK(capacity.code == 200);
  CHECK(capacity.body->as_int() == 1);

  const auto listed = svc.handle(HttpMethod::Get, "/tournaments/1/enrollments", std::nullopt);
  CHECK(listed.body->as_array().size() == 1);

  const auto gone =
      svc.handle(HttpMethod::Delete, "/tournaments/1/enrollments/100000001", std::nullopt);
  CHECK(gone.code == 200);
  const auto emptied = svc.handle(HttpMethod::Get, "/tournaments/1/enrollments", std::nullopt);
  CHECK(emptied.body->as_array().empty());
}

TEST_CASE("deleting a player disenrolls them everywhere") {
  FixtureService svc;
  svc.handle(HttpMethod::Post, "/tournaments", tournament_body("Cup", 3));
  svc.handle(HttpMethod::Post, "/players", player_body("100000001"));
  svc.handle(HttpMethod::Post, "/tournaments/1/enrollments",
             JsonValue::object({{"playerNIF", JsonValue::str("100000001")}}));
  const auto del = svc.handle(HttpMethod::Delete, "/players/100000001", std::nullopt);
  CHECK(del.code == 200);
  // the echo still shows the enrollment at deletion time
  CHECK(del.body->find("tournaments")->as_array().size() == 1);
  const auto t = svc.handle(HttpMethod::Get, "/tournaments/1", std::nullopt);
  CHECK(t.body->find("playerNumber")->as_int() == 0);
}

TEST_CASE("reset clears data, keeps flags, and is idempotent") {
  FaultFlags flags;
  flags.player_insert_not_stored = true;
  FixtureService svc(flags);
  svc.handle(HttpMethod::Post, "/tournaments", tournament_body("Cup", 3));
  svc.reset();
  svc.reset();
  CHECK(svc.handle(HttpMethod::Get, "/tournaments", std::nullopt).body->as_array().empty());
  CHECK(svc.faults().player_insert_not_stored);
  // id counter restarts
  const auto t = svc.handle(HttpMethod::Post, "/tournaments", tournament_body("New", 2));
  CHECK(t.body->find("tournamentId")->as_int() == 1);
}

TEST_CASE("fault: player insertion echoes but does not store") {
  FaultFlags flags;
  flags.player_insert_not_stored = true;
  FixtureService svc(flags);
  const auto post = svc.handle(HttpMethod::Post, "/players", player_body("259447224"));
  CHECK(post.code == 200);
  CHECK(post.body->find("playerNIF")->as_string() == "259447224");
  CHECK(svc.handle(HttpMethod::Get, "/players/259447224", std::nullopt).code == 404);
}

TEST_CASE("fault: the wrong player gets deleted") {
  FaultFlags flags;
  flags.player_delete_wrong_player = true;
  FixtureService svc(flags);
  svc.handle(HttpMethod::Post, "/players", player_body("100000001"));
  svc.handle(HttpMethod::Post, "/players", player_body("200000002", "bea"));
  const auto del = svc.handle(HttpMethod::Delete, "/players/200000002", std::nullopt);
  CHECK(del.code == 200);
  // the oldest other player is returned and removed instead of the target
  CHECK(del.body->find("playerNIF")->as_string() == "100000001");
  CHECK(svc.handle(HttpMethod::Get, "/players/200000002", std::nullopt).code == 200);
  CHECK(svc.handle(HttpMethod::Get, "/players/100000001", std::nullopt).code == 404);
}

TEST_CASE("fault: wrong-player deletion with a sole player is a phantom no-op") {
  FaultFlags flags;
  flags.player_delete_wrong_player = true;
  FixtureService svc(flags);
  svc.handle(HttpMethod::Post, "/players", player_body("100000001"));
  const auto del = svc.handle(HttpMethod::Delete, "/players/100000001", std::nullopt);
  CHECK(del.code == 200);
  CHECK(del.body->find("playerNIF")->as_string() != "100000001");
  CHECK(svc.handle(HttpMethod::Get, "/players/100000001", std::nullopt).code == 200);
}

TEST_CASE("fault: tournament insertion drops the name") {
  FaultFlags flags;
  flags.tournament_insert_missing_fields = true;
  FixtureService svc(flags);
  const auto post = svc.handle(HttpMethod::Post, "/tournaments", tournament_body("Cup", 3));
  CHECK(post.code == 200);
  CHECK(post.body->find("tournamentName") == nullptr);
  CHECK(post.body->find("capacity")->as_int() == 3);
}

TEST_CASE("fault: tournament update changes nothing") {
  FaultFlags flags;
  flags.tournament_update_noop = true;
  FixtureService svc(flags);
  svc.handle(HttpMethod::Post, "/tournaments", tournament_body("Old", 3));
  const auto put = svc.handle(HttpMethod::Put, "/tournaments/1",
                              JsonValue::object({{"tournamentName", JsonValue::str("New")},
                                                 {"capacity", JsonValue::integer(5)}}));
  CHECK(put.code == 200);
  CHECK(put.body->find("tournamentName")->as_string() == "Old");
  const auto get = svc.handle(HttpMethod::Get, "/tournaments/1", std::nullopt);
  CHECK(get.body->find("tournamentName")->as_string() == "Old");
  CHECK(get.body->find("capacity")->as_int() == 3);
}

TEST_CASE("fault: tournament deletion returns null yet deletes") {
  FaultFlags flags;
  flags.tournament_delete_returns_null = true;
  FixtureService svc(flags);
  svc.handle(HttpMethod::Post, "/tournaments", tournament_body("Cup", 3));
  const auto del = svc.handle(HttpMethod::Delete, "/tournaments/1", std::nullopt);
  CHECK(del.code == 200);
  REQUIRE(del.body.has_value());
  CHECK(del.body->is_null());
  CHECK(svc.handle(HttpMethod::Get, "/tournaments/1", std::nullopt).code == 404);
}

TEST_CASE("fault: enrollment deletion acknowledges but leaves the enrollment") {
  FaultFlags flags;
  flags.enrollment_delete_noop = true;
  FixtureService svc(flags);
  svc.handle(HttpMethod::Post, "/tournaments", tournament_body("Cup", 3));
  svc.handle(HttpMethod::Post, "/players", player_body("100000001"));
  svc.handle(HttpMethod::Post, "/tournaments/1/enrollments",
             JsonValue::object({{"playerNIF", JsonValue::str("100000001")}}));
  const auto del =
      svc.handle(HttpMethod::Delete, "/tournaments/1/enrollments/100000001", std::nullopt);
  CHECK(del.code == 200);
  CHECK(svc.handle(HttpMethod::Get, "/tournaments/1/enrollments/100000001", std::nullopt).code ==
        200);
  // without a stored tournament the handler still reports not-found
  const auto missing =
      svc.handle(HttpMethod::Delete, "/tournaments/99/enrollments/100000001", std::nullopt);
  CHECK(missing.code == 404);
}

TEST_CASE("admin endpoints flip faults and reset state over the wire") {
  FixtureService svc;
  FixtureServer server(svc);
  const int port = server.start(0);
  REQUIRE(port > 0);
  HttpClient client(5);
  const std::string base = server.base_url();

  auto posted = client.send(HttpMethod::Post, base + "/players", player_body("123456789"));
  CHECK(posted.code == 200);
  auto got = client.send(HttpMethod::Get, base + "/players/123456789", std::nullopt);
  CHECK(got.code == 200);
  CHECK(got.message == std::nullopt);

  auto flagged = client.send(HttpMethod::Post, base + "/_admin/faults",
                             JsonValue::object({{"player_insert_not_stored", JsonValue::boolean(true)}}));
  CHECK(flagged.code == 200);
  CHECK(svc.faults().player_insert_not_stored);

  auto reset = client.send(HttpMethod::Post, base + "/_admin/reset", std::nullopt);
  CHECK(reset.code == 200);
  auto after = client.send(HttpMethod::Get, base + "/players/123456789", std::nullopt);
  CHECK(after.code == 404);
  CHECK(after.message == "Player with NIF 123456789 not found.");
  server.stop();
}

TEST_CASE("transport errors are distinct from HTTP statuses") {
  HttpClient client(1);
  CHECK_THROWS_AS(client.send(HttpMethod::Get, "http://127.0.0.1:1/none", std::nullopt),
                  TransportError);
}

TEST_CASE("non-JSON bodies leave the parsed body absent") {
  const HttpResponse r = HttpResponse::from_raw(200, "not json at all");
  CHECK(r.code == 200);
  CHECK(!r.body.has_value());
  CHECK(r.raw_text == "not json at all");
}
