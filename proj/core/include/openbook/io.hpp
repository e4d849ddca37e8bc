#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "openbook/dirichlet.hpp"
#include "openbook/excess.hpp"
#include "openbook/lab.hpp"

namespace obl::io {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form; identical inputs give identical text.
std::string number(double x);

Json to_json(const OpenBook& book);
OpenBook book_from_json(const Json& j);
OpenBook read_book(const std::string& path);
void write_book(const std::string& path, const OpenBook& book);

// JSON-lines: header {m, n, Q, generator, seed}, then {pos, w, tangent}.
void write_current(std::ostream& os, const DiscreteCurrent& t);
DiscreteCurrent read_current(std::istream& is);
DiscreteCurrent read_current(const std::string& path);

// Header {m, n, Q, h, zero_trace}, then {index, atoms} per node.
void write_qfunction(std::ostream& os, const QFunction& u);
QFunction read_qfunction(std::istream& is);

Json to_json(const ExcessReport& report);
Json to_json(const PruneTrace& trace);
Json to_json(const LayerDecomposition& layers);
// Wall time is left out so that records are reproducible.
Json to_json(const ExperimentRecord& record);
Json to_json(const CubeRegion& cube);

// r, D, H, I, then the grid spacing as resolution and a zero noise floor.
void write_frequency_csv(std::ostream& os, const FrequencyProfile& profile);

Json read_json_file(const std::string& path);

// Manifest {fixture, parameters, seeds[], resolutions[]}. Runs one decay job
// per (seed, resolution), writes records as JSON-lines and a CSV summary.
// Returns 0 iff every job conserved Q and kept r_{l+1}/r_l in [eta, 1/2].
int run_manifest(const Json& manifest, std::ostream& records, std::ostream& summary);

}  // namespace obl::io
