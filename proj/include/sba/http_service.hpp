#pragma once

// HTTP front end for serve mode: NWDAF service endpoints plus registry
// inspection and virtual-clock control. The simulation clock only moves when
// a client POSTs /sim/advance (deterministic by default) or when a pace
// factor is configured.

#include <memory>
#include <string>

#include "sba/nwdaf.hpp"

namespace sba::http {

struct ServeOptions {
  std::string host = "127.0.0.1";
  int port = 8080;     // 0 picks an ephemeral port
  double pace = 0.0;   // virtual seconds advanced per wall second; 0 = manual
};

class NwdafServer {
 public:
  NwdafServer(nwdaf::Runtime& runtime, ServeOptions options);
  ~NwdafServer();

  NwdafServer(const NwdafServer&) = delete;
  NwdafServer& operator=(const NwdafServer&) = delete;

  /// Binds the listening socket; false when the endpoint is unavailable.
  bool bind();

  /// Port actually bound (useful with port = 0).
  int port() const { return bound_port_; }

  /// Serves until stop() is called (blocking).
  void run();

  void stop();

 private:
  struct Impl;

  nwdaf::Runtime& runtime_;
  ServeOptions options_;
  int bound_port_ = -1;
  std::unique_ptr<Impl> impl_;
};

}  // namespace sba::http
