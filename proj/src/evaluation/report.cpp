// Copyright (C) 2026 The AME Retrieval Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <cstdio>
#include <string>

#include "ame/evaluation/evaluation.hpp"

namespace ame {

namespace {

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

void write_report_csv(std::ostream& os, std::string_view task, const std::vector<RetrievalReport>& reports) {
  os << "task,direction,folds,r1,r5,r10,median_rank,alignment\n";
  for (const auto& r : reports) {
    os << task << ',' << to_string(r.direction) << ',' << r.folds << ',' << fixed(r.r1, 4) << ',' << fixed(r.r5, 4)
       << ',' << fixed(r.r10, 4) << ',' << fixed(r.median_rank, 4) << ',' << fixed(r.alignment, 4) << '\n';
  }
}

void write_report_table(std::ostream& os, const std::vector<RetrievalReport>& reports) {
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %5s %7s %7s %7s %7s %10s\n", "direction", "folds", "R@1", "R@5", "R@10",
                "Mr", "Alignment");
  os << line;
  for (const auto& r : reports) {
    const std::string dir(to_string(r.direction));
    std::snprintf(line, sizeof line, "%-10s %5zu %7s %7s %7s %7s %10s\n", dir.c_str(), r.folds,
                  fixed(r.r1, 1).c_str(), fixed(r.r5, 1).c_str(), fixed(r.r10, 1).c_str(),
                  fixed(r.median_rank, 1).c_str(), std::isnan(r.alignment) ? "-" : fixed(r.alignment, 1).c_str());
    os << line;
  }
}

}  // namespace ame
