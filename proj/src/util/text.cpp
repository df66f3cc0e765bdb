#include "migratekit/util/text.hpp"

#include <algorithm>
#include <cctype>

namespace migratekit::text {

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    return rtrim(s);
}

std::string_view rtrim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

int count_nonblank_lines(std::string_view text) {
    int n = 0;
    for (const auto& line : split_lines(text)) {
        if (!is_blank(line)) ++n;
    }
    return n;
}

int count_lines(std::string_view text) { return static_cast<int>(split_lines(text).size()); }

std::string extract_code_block(std::string_view completion) {
    auto open = completion.find("```");
    if (open == std::string_view::npos) return std::string(completion);
    auto body_start = completion.find('\n', open);
    if (body_start == std::string_view::npos) return {};
    ++body_start;
    auto close = completion.find("```", body_start);
    if (close == std::string_view::npos) return std::string(completion.substr(body_start));
    return std::string(completion.substr(body_start, close - body_start));
}

std::string normalize_ws(std::string_view s) {
    std::string out;
    bool in_space = false;
    for (char c : trim(s)) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out += ' ';
        in_space = false;
        out += c;
    }
    return out;
}

int line_of_offset(std::string_view text, std::size_t offset) {
    offset = std::min(offset, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

bool is_identifier(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
}

std::string file_stem_for_id(std::string_view id) {
    std::string out;
    out.reserve(id.size());
    for (std::size_t i = 0; i < id.size(); ++i) {
        char c = id[i];
        if (c == ':' && i + 1 < id.size() && id[i + 1] == ':') {
            out += "__";
            ++i;
        } else if (c == '/' || c == '\\') {
            out += '_';
        } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-') {
            out += c;
        } else {
            out += '_';
        }
    }
    return out;
}

}  // namespace migratekit::text
