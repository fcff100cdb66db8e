// uavlabel-server: serves the JSON API for one data root.

#include <CLI11.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>

#include "uavlabel/service.hpp"

namespace {

uavlabel::service::ApiServer* running = nullptr;

void on_signal(int) {
  if (running != nullptr) running->stop();
}

}  // namespace

int main(int argc, char** argv) {
  using namespace uavlabel;

  CLI::App app{"uavlabel-server: labeling API"};
  std::string data_root;
  service::ServiceConfig config;
  int timeout_minutes = 12 * 60;
  app.add_option("--data-root", data_root, std::string("data root (default: $") + kDataRootEnv + ")");
  app.add_option("--bind", config.bind_address, "listen address");
  app.add_option("--port", config.port, "listen port (0 picks one)");
  app.add_option("--session-timeout", timeout_minutes, "idle session timeout in minutes")
      ->check(CLI::PositiveNumber);
  app.add_option("--tracker-buffer", config.tracker.buffer, "default tracker search margin (px)")
      ->check(CLI::Range(0, kMaxTrackerBuffer));
  app.add_option("--tracker-threshold", config.tracker.brightness_threshold, "foreground intensity threshold");
  app.add_option("--tracker-size", config.tracker.size_threshold, "boxes above this area are copied, not tracked");
  CLI11_PARSE(app, argc, argv);

  if (data_root.empty()) {
    if (const char* env = std::getenv(kDataRootEnv)) data_root = env;
  }
  if (data_root.empty()) {
    std::cerr << "error: pass --data-root or set " << kDataRootEnv << "\n";
    return 2;
  }

  try {
    AccountOptions accounts;
    accounts.idle_timeout = std::chrono::minutes(timeout_minutes);
    DataRoot root(data_root, {}, accounts);
    service::ApiServer server(root, config);
    const int port = server.bind();
    running = &server;
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    std::cout << "listening on " << config.bind_address << ":" << port << std::endl;
    server.listen();
    running = nullptr;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
