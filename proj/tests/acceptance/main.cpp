// Runs the acceptance criteria and prints one PASS/FAIL line for each.
//
//   sliceparse_acceptance [--only 1,2,...] [--skip 7,...]

#include <spdlog/spdlog.h>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <exception>
#include <set>
#include <sstream>
#include <string>

#include "criteria.hpp"

namespace {

std::set<int> parse_ids(const char* text) {
  std::set<int> ids;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) ids.insert(std::stoi(item));
  return ids;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace sliceparse::acceptance;
  std::set<int> only, skip;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) {
      only = parse_ids(argv[++i]);
    } else if (std::strcmp(argv[i], "--skip") == 0 && i + 1 < argc) {
      skip = parse_ids(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only IDS] [--skip IDS]\n", argv[0]);
      return 2;
    }
  }
  spdlog::set_level(spdlog::level::warn);

  int failed = 0;
  for (const Criterion& c : all_criteria()) {
    if ((!only.empty() && !only.count(c.id)) || skip.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.time_limit > 0.0 && seconds >= c.time_limit) {
      outcome.pass = false;
      outcome.detail += "; over time limit";
    }
    if (!outcome.pass) ++failed;
    std::printf("criterion %d %-26s %s  %s  [%.1f s", c.id, c.name.c_str(), outcome.pass ? "PASS" : "FAIL",
                outcome.detail.c_str(), seconds);
    if (c.time_limit > 0.0) std::printf(" / limit %.0f s", c.time_limit);
    std::printf("]\n");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
