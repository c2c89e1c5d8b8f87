#pragma once

// FFTAG/1: a minimal line protocol standing in for a PLC tag server.
//
//   request   READ <tag>\n
//             SUBSCRIBE <tag> <interval_ms>\n
//   response  VALUE <tag> <int> <epoch_ms>\n
//             ERR <message>\n
//
// One tag is served: "cycle_state". A SUBSCRIBE answers immediately and then
// every interval_ms until the client disconnects.

#include <atomic>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>

#include "assemai/core.hpp"
#include "assemai/timing.hpp"

namespace assemai {

inline constexpr std::uint16_t kFftagDefaultPort = 14840;
inline constexpr const char* kCycleStateTag = "cycle_state";

/// Connection problem. `retry_after_ms` is a suggested wait before retrying.
class TransportError : public Error {
 public:
  TransportError(const std::string& what, std::int64_t retry_after_ms)
      : Error(what), retry_after_ms_(retry_after_ms) {}
  std::int64_t retry_after_ms() const noexcept { return retry_after_ms_; }

 private:
  std::int64_t retry_after_ms_;
};

/// The peer sent something that is not valid FFTAG/1, or an ERR line.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

struct TagReading {
  std::string tag;
  CycleState value{1};
  std::int64_t server_time_ms = 0;
};

/// Time source for the server: wall-clock epoch milliseconds, plus an
/// interruptible sleep. Tests substitute a virtual clock.
struct ServerClock {
  std::function<std::int64_t()> now_ms;
  /// Waits up to `ms`; returns false when `stop` became true meanwhile.
  std::function<bool(std::int64_t ms, const std::atomic<bool>& stop)> sleep_ms;

  static ServerClock system();
  /// Starts at `start_ms`; each sleep advances virtual time instantly.
  static ServerClock virtual_clock(std::int64_t start_ms);
};

/// Tag state derived from the cycle timing, counted from `origin_ms`.
class CycleTagSource {
 public:
  CycleTagSource(CycleTiming timing, std::int64_t origin_ms) : timing_(std::move(timing)), origin_ms_(origin_ms) {}
  CycleState state_at(std::int64_t now_ms) const;

 private:
  CycleTiming timing_;
  std::int64_t origin_ms_;
};

/// Parsed request line (without the newline).
struct FftagRequest {
  enum class Kind { Read, Subscribe } kind;
  std::string tag;
  std::int64_t interval_ms = 0;
};

/// Parses a request; returns the ERR line to send when it is not valid.
std::optional<FftagRequest> parse_fftag_request(std::string_view line, std::string* error_response);

/// Encodes a VALUE line, newline included.
std::string fftag_value_line(std::string_view tag, int value, std::int64_t epoch_ms);

/// Parses a VALUE line (newline optional). ERR lines and anything malformed
/// raise ProtocolError.
TagReading parse_fftag_response(std::string_view line);

/// Threaded TCP server. Each client gets its own thread.
class PlcServer {
 public:
  /// Binds immediately; port 0 picks a free port. Throws IoError on failure.
  PlcServer(CycleTiming timing, const std::string& bind_address, std::uint16_t port,
            ServerClock clock = ServerClock::system());
  ~PlcServer();
  PlcServer(const PlcServer&) = delete;
  PlcServer& operator=(const PlcServer&) = delete;

  std::uint16_t port() const noexcept { return port_; }
  /// Stops accepting, disconnects clients and joins all threads. Idempotent.
  void stop();

 private:
  struct Client {
    int fd;
    std::thread worker;
    std::shared_ptr<std::atomic<bool>> done;
  };

  void accept_loop();
  void serve_client(int fd);
  void reap_finished();

  CycleTagSource source_;
  ServerClock clock_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};
  std::thread acceptor_;
  std::mutex clients_mutex_;
  std::list<Client> clients_;
};

/// One-shot READ over a fresh connection.
TagReading read_tag(const std::string& host, std::uint16_t port, std::string_view tag = kCycleStateTag,
                    int timeout_ms = 2000);

/// Open SUBSCRIBE stream. next() blocks for the following reading and
/// throws TransportError when the connection drops or times out.
class TagSubscription {
 public:
  TagSubscription(const std::string& host, std::uint16_t port, std::string_view tag, std::int64_t interval_ms,
                  int timeout_ms = 2000);
  ~TagSubscription();
  TagSubscription(const TagSubscription&) = delete;
  TagSubscription& operator=(const TagSubscription&) = delete;

  TagReading next();
  void close();

 private:
  int fd_ = -1;
  int timeout_ms_;
  std::string buffer_;
};

}  // namespace assemai
