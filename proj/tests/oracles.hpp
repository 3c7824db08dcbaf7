#pragma once

// Independent reference computations used by the unit and acceptance tests.
// They recompute quantities from definitions, by brute force, without going
// through the library routine under test.

#include <string>
#include <vector>

#include "germlab/cartanlab.hpp"
#include "germlab/convalg.hpp"
#include "germlab/fellbundle.hpp"
#include "germlab/generator.hpp"
#include "germlab/germgpd.hpp"
#include "germlab/io.hpp"
#include "germlab/linebundle.hpp"
#include "germlab/pipeline.hpp"

namespace oracle {

using namespace germlab;

std::string fixture_path(const std::string& name);
json load_fixture(const std::string& name);
PreparedBundle prepared_fixture(const std::string& name);
PreparedBundle prepared_from(const json& doc);

// Seeds first..first+count-1 with |S| <= 8 and 2..16 points.
std::vector<json> random_fixture_set(int count, std::uint64_t first_seed = 0);

// Number of germ classes of a discrete action, with [s,x] = [t,x] decided by
// searching the idempotent table for e with x in U_e and se = te.
int germ_count(const Action& action);

// Every basis triple checked against the structure constants directly.
// Returns false and fills *where on the first violation.
bool associative(const FellBundle& b, json* where = nullptr);

// Largest singular value of π_x(ξ) maximized over units, with π_x built
// from the stored constants.
double reduced_norm(const LineBundle& l, const Section& xi);

// For a groupoid line bundle: max over composable input arrows (a, b) of
// |mulc(φa, φb) - σ(a,b) λ(ab) / (λ(a) λ(b))| where λ(a) is the coordinate
// of the basis section of a bissection through a.
double transport_error(const GroupoidLineBundle& input);

// Operator norm of a matrix, by SVD.
double opnorm(const Eigen::MatrixXcd& m);

}  // namespace oracle
