#pragma once

#include <string>

#include "fpiua/network.hpp"
#include "fpiua/program.hpp"
#include "fpiua/table.hpp"

namespace fpiua {

// Text formats, all floats in the s:e:m encoding so every file round-trips bit-exactly.
std::string network_to_text(const Network& n);
Network network_from_text(const std::string& s);
std::string program_to_text(const Program& p);
Program program_from_text(const std::string& s);
std::string table_to_text(const Table& t);
Table table_from_text(const std::string& s);
std::string classifier_to_text(const Classifier& c);
Classifier classifier_from_text(const std::string& s);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

} // namespace fpiua
