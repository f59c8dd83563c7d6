#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace selfcurate {

std::string trim(std::string_view s);

/// Lowercase hex SHA-256 digest of a byte string.
std::string sha256_hex(std::string_view data);

/// UTC timestamp, ISO 8601 with millisecond precision.
std::string iso8601_now();

std::string read_file(const std::filesystem::path& path);

/// Write via a sibling temp file and rename, so readers never see a partial file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

/// Counting semaphore with a runtime limit; serializes token acquisition.
class Semaphore {
 public:
  explicit Semaphore(int permits);

  void acquire();
  void release();

 private:
  std::mutex mutex_;
  std::condition_variable cv_;
  int permits_;
};

/// RAII token for a Semaphore.
class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(Semaphore& sem) : sem_(sem) { sem_.acquire(); }
  ~SemaphoreGuard() { sem_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  Semaphore& sem_;
};

/// Fixed-size worker pool. submit() enqueues, wait_idle() blocks until the
/// queue drains and all workers are parked. With threads <= 1 tasks run
/// inline on the submitting thread.
class WorkerPool {
 public:
  explicit WorkerPool(int threads);
  ~WorkerPool();

  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  void submit(std::function<void()> task);
  void wait_idle();

 private:
  void worker_loop();

  std::vector<std::thread> threads_;
  std::deque<std::function<void()>> queue_;
  std::mutex mutex_;
  std::condition_variable cv_task_;
  std::condition_variable cv_idle_;
  int active_ = 0;
  bool stop_ = false;
};

}  // namespace selfcurate
