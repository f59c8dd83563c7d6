#include <doctest.h>

#include <atomic>
#include <filesystem>
#include <thread>

#include "selfcurate/util.hpp"

using namespace selfcurate;

TEST_CASE("sha256 matches the NIST test vectors") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  // Block-boundary lengths exercise the two-block tail path.
  CHECK(sha256_hex(std::string(55, 'a')) ==
        "9f4390f8d30c2dd92ec9f095b65e2b9ae9b0a925a5258e241c9f1e910f734318");
  CHECK(sha256_hex(std::string(56, 'a')) ==
        "b35439a4ac6f0948b6d6f9e3c6af0f5f590ce20f1bde7090ef7970686ec6738a");
  CHECK(sha256_hex(std::string(64, 'a')) ==
        "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
}

TEST_CASE("trim strips surrounding whitespace only") {
  CHECK(trim("  a b  ") == "a b");
  CHECK(trim("\n\t x \r\n") == "x");
  CHECK(trim("") == "");
  CHECK(trim("   \n  ") == "");
  CHECK(trim("no-op") == "no-op");
}

TEST_CASE("atomic_write_file leaves no temp file and round-trips content") {
  auto dir = std::filesystem::temp_directory_path() / "selfcurate_util_test";
  std::filesystem::create_directories(dir);
  auto path = dir / "out.txt";
  atomic_write_file(path, "hello\nworld\n");
  CHECK(read_file(path) == "hello\nworld\n");
  CHECK_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
  atomic_write_file(path, "second");
  CHECK(read_file(path) == "second");
  std::filesystem::remove_all(dir);
}

TEST_CASE("worker pool drains all tasks") {
  std::atomic<int> counter{0};
  {
    WorkerPool pool(4);
    for (int i = 0; i < 100; ++i) {
      pool.submit([&] { counter.fetch_add(1); });
    }
    pool.wait_idle();
    CHECK(counter.load() == 100);
  }
}

TEST_CASE("single-thread pool runs inline") {
  WorkerPool pool(1);
  int value = 0;
  pool.submit([&] { value = 7; });
  CHECK(value == 7);
  pool.wait_idle();
}

TEST_CASE("semaphore bounds concurrent holders") {
  Semaphore sem(3);
  std::atomic<int> inside{0};
  std::atomic<int> peak{0};
  std::vector<std::thread> threads;
  for (int i = 0; i < 16; ++i) {
    threads.emplace_back([&] {
      SemaphoreGuard guard(sem);
      int now = inside.fetch_add(1) + 1;
      int prev = peak.load();
      while (now > prev && !peak.compare_exchange_weak(prev, now)) {
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(1));
      inside.fetch_sub(1);
    });
  }
  for (auto& t : threads) t.join();
  CHECK(peak.load() <= 3);
  CHECK(peak.load() >= 1);
}
