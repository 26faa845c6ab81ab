// Times the serial reference sweeps against the OpenMP kernels on the
// bundled constructions. Usage: matchlab_bench [n] [k]  (defaults 6 2).

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "matchlab/constructions.hpp"
#include "matchlab/strategy.hpp"

using namespace matchlab;

namespace {

template <typename F>
double seconds(F&& body) {
  auto start = std::chrono::steady_clock::now();
  body();
  auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

void compare(const char* label, double serial, double parallel) {
  std::printf("%-38s serial %8.3fs   parallel %8.3fs   speedup %.2fx\n", label, serial, parallel,
              parallel > 0 ? serial / parallel : 0.0);
}

}  // namespace

int main(int argc, char** argv) {
  int n = argc > 1 ? std::atoi(argv[1]) : 8;
  int k = argc > 2 ? std::atoi(argv[2]) : 2;

  {
    ConstructionBundle mot = motivating_example();
    BneEnumeration serial_result, parallel_result;
    double ts = seconds([&] {
      serial_result = enumerate_bne(mot.economy, StrategyClass::Full, false,
                                    kDefaultProfileBudget, Execution::Serial);
    });
    double tp = seconds([&] {
      parallel_result = enumerate_bne(mot.economy, StrategyClass::Full, false,
                                      kDefaultProfileBudget, Execution::Parallel);
    });
    if (serial_result.groups.size() != parallel_result.groups.size() ||
        serial_result.bne_count != parallel_result.bne_count) {
      std::fprintf(stderr, "FATAL: serial and parallel enumerations disagree\n");
      return 1;
    }
    compare("enumerate_bne (motivating, full)", ts, tp);
  }

  {
    ConstructionBundle bundle = example2(n);
    const StrategyProfile& candidate = bundle.profile("candidate").profile;
    EquilibriumReport rs, rp;
    double ts = seconds(
        [&] { rs = is_bne(bundle.economy, candidate, StrategyClass::Full, Execution::Serial); });
    double tp = seconds(
        [&] { rp = is_bne(bundle.economy, candidate, StrategyClass::Full, Execution::Parallel); });
    if (rs.is_bne != rp.is_bne) {
      std::fprintf(stderr, "FATAL: serial and parallel verification disagree\n");
      return 1;
    }
    char label[64];
    std::snprintf(label, sizeof label, "is_bne full sweep (example2 n=%d)", n);
    compare(label, ts, tp);
  }

  {
    ConstructionBundle bundle = prop4(n, k);
    const StrategyProfile& candidate = bundle.profile("candidate").profile;
    EquilibriumReport rs, rp;
    double ts = seconds([&] {
      rs = is_bne(bundle.economy, candidate, StrategyClass::Dropping, Execution::Serial);
    });
    double tp = seconds([&] {
      rp = is_bne(bundle.economy, candidate, StrategyClass::Dropping, Execution::Parallel);
    });
    if (rs.is_bne != rp.is_bne) {
      std::fprintf(stderr, "FATAL: serial and parallel verification disagree\n");
      return 1;
    }
    char label[64];
    std::snprintf(label, sizeof label, "is_bne dropping sweep (prop4 %d,%d)", n, k);
    compare(label, ts, tp);
  }

  return 0;
}
