#pragma once

#include <map>
#include <string>

namespace nullsteer {

/// Maps JSON pointers ("/model/gamma") to the 1-based line where the value
/// starts. The text must already be valid JSON.
std::map<std::string, int> locate_json_values(const std::string& text);

/// 1-based line containing byte offset pos.
int line_of_offset(const std::string& text, std::size_t pos);

}  // namespace nullsteer
