#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ppsc/graph.hpp"
#include "ppsc/symbolic.hpp"

namespace ppsc::verify {

enum class Scale { small, full };

Scale scale_from_string(const std::string& name);

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// The 5-node worked example: base graph, oriented spanning tree with the
// selection order (5,2) < (2,3) < (2,1) < (3,4).
netgraph::Graph demo5_graph();
netgraph::OrientedTree demo5_tree();

// Structural suite for one mechanism: column sums of C, zero column sums and
// full column rank of D, rank deficiency of C, and the tree-Laplacian shape
// of D D^T. Reusable on externally supplied matrices as a negative control.
CheckResult mechanism_structure_check(const symbolic::MechanismMatrices& mm,
                                      const std::string& label);

// Criteria 1..11 of the verification plan (12, report byte-identity, lives
// with the CLI since it exercises report emission). `log` gets one line per
// criterion as it finishes.
std::vector<CheckResult> acceptance_criteria(Scale scale, std::ostream* log = nullptr);

bool all_passed(const std::vector<CheckResult>& results);

}  // namespace ppsc::verify
