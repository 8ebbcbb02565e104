#pragma once
// JSON/JSONL file helpers. Outputs use insertion-ordered objects so files are
// byte-stable and keys appear in the documented order.

#include "wikicat/error.hpp"

#include <fstream>
#include <functional>
#include <string>

#include <nlohmann/json.hpp>

namespace wikicat {

using Json = nlohmann::ordered_json;

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path);
    out << j.dump(2) << '\n';
}

// Calls fn(object, line_number) for every non-blank line.
inline void for_each_jsonl(const std::string& path, const std::function<void(const Json&, std::size_t)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open " + path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        Json j;
        try {
            j = Json::parse(line);
            fn(j, line_no);
        } catch (const Json::exception& e) {
            throw InputError(where(path, line_no) + ": " + e.what());
        } catch (const InputError& e) {
            throw InputError(where(path, line_no) + ": " + e.what());
        }
    }
}

}  // namespace wikicat
