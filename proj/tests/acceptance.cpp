#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>

#include "depthlab/errors.hpp"
#include "depthlab/experiment.hpp"
#include "depthlab/verify.hpp"

// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Optional arguments: a filter such as "1,3-5" and a path for the CSV outputs.
int main(int argc, char** argv) {
  using namespace depthlab;
  VerifyOptions opts;
  try {
    if (argc > 1) opts.filter = parse_filter(argv[1]);
    if (const char* t = std::getenv("DEPTHLAB_THREADS")) opts.threads = std::max(1, std::atoi(t));
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }
  auto results = run_verify(opts);
  std::cout << verify_report(results) << std::flush;
  if (argc > 2) write_file(argv[2], verify_csv(results));
  return all_passed(results) ? 0 : 2;
}
