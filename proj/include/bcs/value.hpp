#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "bcs/ast.hpp"

namespace bcs {

/// Sorted, duplicate-free set of binding-site AstIds (assignments, loop bindings, module parameters).
class Taint {
public:
    Taint() = default;
    Taint(std::initializer_list<AstId> ids) : ids_(ids) { normalize(); }

    void insert(AstId id) {
        const auto it = std::lower_bound(ids_.begin(), ids_.end(), id);
        if (it == ids_.end() || *it != id) ids_.insert(it, id);
    }
    void merge(const Taint& other) {
        if (other.ids_.empty()) return;
        std::vector<AstId> out;
        out.reserve(ids_.size() + other.ids_.size());
        std::set_union(ids_.begin(), ids_.end(), other.ids_.begin(), other.ids_.end(), std::back_inserter(out));
        ids_ = std::move(out);
    }
    bool contains(AstId id) const { return std::binary_search(ids_.begin(), ids_.end(), id); }
    bool empty() const { return ids_.empty(); }
    std::size_t size() const { return ids_.size(); }
    const std::vector<AstId>& ids() const { return ids_; }

    friend bool operator==(const Taint&, const Taint&) = default;

private:
    void normalize() {
        std::sort(ids_.begin(), ids_.end());
        ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
    }
    std::vector<AstId> ids_;
};

inline Taint operator|(Taint a, const Taint& b) {
    a.merge(b);
    return a;
}

struct Undef {
    friend bool operator==(Undef, Undef) { return true; }
};

struct Range {
    double start = 0;
    double step = 1;
    double end = 0;
    friend bool operator==(const Range&, const Range&) = default;

    /// Values start, start+step, ... not passing end; a small tolerance absorbs float drift.
    std::size_t count() const {
        if (step == 0) return 0;
        const double span = (end - start) / step;
        if (span < -1e-9) return 0;
        return static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    }
    double at(std::size_t i) const { return start + static_cast<double>(i) * step; }
};

struct Value;
using ValueList = std::vector<Value>;

/// Runtime value; `taint` holds the binding sites whose values flowed into it.
struct Value {
    std::variant<Undef, double, bool, ValueList, Range> data;
    Taint taint;

    Value() = default;
    Value(double d, Taint t = {}) : data(d), taint(std::move(t)) {}
    Value(bool b, Taint t = {}) : data(b), taint(std::move(t)) {}
    Value(ValueList v, Taint t = {}) : data(std::move(v)), taint(std::move(t)) {}
    Value(Range r, Taint t = {}) : data(r), taint(std::move(t)) {}

    bool is_undef() const { return std::holds_alternative<Undef>(data); }
    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_vector() const { return std::holds_alternative<ValueList>(data); }
    bool is_range() const { return std::holds_alternative<Range>(data); }

    double number() const { return std::get<double>(data); }
    bool boolean() const { return std::get<bool>(data); }
    const ValueList& vector() const { return std::get<ValueList>(data); }
    const Range& range() const { return std::get<Range>(data); }

    bool truthy() const {
        if (is_bool()) return boolean();
        if (is_number()) return number() != 0;
        if (is_vector()) return !vector().empty();
        return is_range();
    }

    /// Structural equality, ignoring taint.
    bool same(const Value& o) const {
        if (data.index() != o.data.index()) return false;
        if (is_vector()) {
            const auto& a = vector();
            const auto& b = o.vector();
            if (a.size() != b.size()) return false;
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!a[i].same(b[i])) return false;
            return true;
        }
        if (is_number()) return number() == o.number();
        if (is_bool()) return boolean() == o.boolean();
        if (is_range()) return range() == o.range();
        return true;
    }

    /// Numbers-only vector of any length.
    bool is_numeric_vector() const {
        return is_vector() && std::all_of(vector().begin(), vector().end(), [](const Value& v) { return v.is_number(); });
    }

    std::string type_name() const {
        switch (data.index()) {
            case 0: return "undef";
            case 1: return "number";
            case 2: return "bool";
            case 3: return "vector";
            default: return "range";
        }
    }

    std::string to_string() const {
        std::ostringstream os;
        os.precision(12);
        if (is_undef()) os << "undef";
        else if (is_number()) os << number();
        else if (is_bool()) os << (boolean() ? "true" : "false");
        else if (is_range()) os << "[" << range().start << ":" << range().step << ":" << range().end << "]";
        else {
            os << "[";
            for (std::size_t i = 0; i < vector().size(); ++i) os << (i ? ", " : "") << vector()[i].to_string();
            os << "]";
        }
        return os.str();
    }
};

}  // namespace bcs
