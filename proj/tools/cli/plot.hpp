#pragma once

#include <string>

namespace dampwave::cli {

/// Renders a trace.csv (log10 E against t, with a fitted line) or a
/// gcc_report.json (min average against T) as a standalone SVG document.
/// Throws IoError for empty or unrecognized input.
std::string render_svg(const std::string& input_text);

}  // namespace dampwave::cli
