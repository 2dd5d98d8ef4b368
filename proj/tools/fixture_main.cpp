#include <chrono>
#include <csignal>
#include <iostream>
#include <string>
#include <thread>

#include "petit/fixture_service.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int) { g_stop = 1; }

}  // namespace

// Runs the tournaments application on a local port. Fault flags can be
// switched on from the command line or later via POST /_admin/faults.
int main(int argc, char** argv) {
  int port = 8750;
  petit::fixture::FaultFlags flags;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--port" && i + 1 < argc) {
      port = std::stoi(argv[++i]);
    } else if (arg == "--fault" && i + 1 < argc) {
      const std::string name = argv[++i];
      if (name == "tournament_delete_returns_null") flags.tournament_delete_returns_null = true;
      else if (name == "enrollment_delete_noop") flags.enrollment_delete_noop = true;
      else if (name == "tournament_insert_missing_fields") flags.tournament_insert_missing_fields = true;
      else if (name == "tournament_update_noop") flags.tournament_update_noop = true;
      else if (name == "player_insert_not_stored") flags.player_insert_not_stored = true;
      else if (name == "player_delete_wrong_player") flags.player_delete_wrong_player = true;
      else {
        std::cerr << "unknown fault '" << name << "'\n";
        return 2;
      }
    } else {
      std::cerr << "usage: tournaments_fixture [--port N] [--fault <name>]...\n";
      return 2;
    }
  }

  petit::fixture::FixtureService service(flags);
  petit::fixture::FixtureServer server(service);
  server.start(port);
  std::cout << "tournaments application listening on " << server.base_url() << "\n";

  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }
  server.stop();
  return 0;
}
