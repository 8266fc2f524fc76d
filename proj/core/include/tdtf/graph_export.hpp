#pragma once

#include <string>

#include "tdtf/model.hpp"

namespace tdtf {

/// {"span", "columns", "nodes":[{ga, chain_tag?, version, release_date}],
///  "dep_edges":[{from, to, columns}], "chain_edges":[{from, to}]}; edges use node indices.
std::string tdt_to_json(const TimeDependencyTree& tdt);

/// Graphviz rendering: dependency edges solid, chain edges dashed.
std::string tdt_to_dot(const TimeDependencyTree& tdt);

}  // namespace tdtf
