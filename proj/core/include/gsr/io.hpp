#ifndef GSR_IO_HPP
#define GSR_IO_HPP

#include <iosfwd>
#include <string>

#include "gsr/graph.hpp"
#include "gsr/imperfect.hpp"
#include "gsr/seeding.hpp"
#include "gsr/types.hpp"

namespace gsr {

/// Graph files: ".json" uses {"n", "directed", "edges": [[src,dst,w],...]};
/// anything else is an edge-list CSV "src,dst,weight" (0-indexed, header
/// optional, weight defaulting to 1). CSV carries no directedness, so the
/// caller supplies it.
Graph read_graph_file(const std::string& path, bool csv_directed = false);
Graph parse_graph_csv(std::istream& in, bool directed);
Graph parse_graph_json_text(const std::string& text);
std::string graph_to_json_text(const Graph& g);

/// Signal CSV: one value per line, "re" or "re,im".
Vector read_signal_csv(const std::string& path);
Vector parse_signal_csv(std::istream& in);
void write_signal_csv(const std::string& path, const Vector& x);
std::string signal_to_csv(const Vector& x);

std::string filter_to_json_text(const FilterDesign& f);
FilterDesign filter_from_json_text(const std::string& text);

std::string schedule_to_json_text(const SeedingSchedule& s);
SeedingSchedule schedule_from_json_text(const std::string& text);

std::string plan_to_json_text(const ReconstructionPlan& plan);
ReconstructionPlan plan_from_json_text(const std::string& text);

std::string report_to_json_text(const ReconstructionReport& report);
std::string selection_to_json_text(const SelectionResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gsr

#endif  // GSR_IO_HPP
