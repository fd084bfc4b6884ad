#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

namespace bcs {

/// Half-open byte range [start, end) with 1-based line/column of both ends.
/// Columns count bytes, not code points.
struct SourceSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    int start_line = 1;
    int start_col = 1;
    int end_line = 1;
    int end_col = 1;

    std::size_t size() const { return end - start; }
    bool contains(const SourceSpan& other) const { return start <= other.start && other.end <= end; }
    bool overlaps(const SourceSpan& other) const { return start < other.end && other.start < end; }
    std::string_view text(std::string_view source) const { return source.substr(start, end - start); }

    friend bool operator==(const SourceSpan& a, const SourceSpan& b) { return a.start == b.start && a.end == b.end; }
    friend bool operator<(const SourceSpan& a, const SourceSpan& b) {
        return a.start != b.start ? a.start < b.start : a.end < b.end;
    }
};

/// Maps byte offsets of one source text to line/column positions.
class LineIndex {
public:
    explicit LineIndex(std::string_view source) : size_(source.size()) {
        line_starts_.push_back(0);
        for (std::size_t i = 0; i < source.size(); ++i)
            if (source[i] == '\n') line_starts_.push_back(i + 1);
    }

    std::pair<int, int> position(std::size_t offset) const {
        if (offset > size_) throw std::out_of_range("offset past end of source");
        const auto it = std::upper_bound(line_starts_.begin(), line_starts_.end(), offset);
        const auto line = static_cast<std::size_t>(it - line_starts_.begin());
        return {static_cast<int>(line), static_cast<int>(offset - line_starts_[line - 1] + 1)};
    }

    SourceSpan span(std::size_t start, std::size_t end) const {
        SourceSpan s;
        s.start = start;
        s.end = end;
        std::tie(s.start_line, s.start_col) = position(start);
        std::tie(s.end_line, s.end_col) = position(end);
        return s;
    }

    std::size_t offset(int line, int col) const {
        if (line < 1 || static_cast<std::size_t>(line) > line_starts_.size())
            throw std::out_of_range("line out of range");
        const std::size_t off = line_starts_[static_cast<std::size_t>(line) - 1] + static_cast<std::size_t>(col - 1);
        if (off > size_) throw std::out_of_range("column out of range");
        return off;
    }

    std::size_t source_size() const { return size_; }

private:
    std::size_t size_;
    std::vector<std::size_t> line_starts_;
};

enum class Severity { error, warning };

inline const char* to_string(Severity s) { return s == Severity::error ? "error" : "warning"; }

struct Diagnostic {
    SourceSpan span;
    std::string message;
    Severity severity = Severity::error;
};

inline bool has_errors(const std::vector<Diagnostic>& diags) {
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::error; });
}

/// "3:7: error: message"
inline std::string format_diagnostic(const Diagnostic& d) {
    return std::to_string(d.span.start_line) + ":" + std::to_string(d.span.start_col) + ": " +
           to_string(d.severity) + ": " + d.message;
}

/// Error thrown by queries and edits; `code` is the protocol error code.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message) : std::runtime_error(message), code_(std::move(code)) {}
    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace bcs
