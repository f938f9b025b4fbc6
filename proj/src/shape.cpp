// Copyright 2026 The shapeprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "shapeprobe/shape.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace shapeprobe {

Shape Shape::of(std::vector<Dim> dims) {
    Shape s;
    s.kind_ = Kind::RankKnown;
    s.dims_ = std::move(dims);
    return s;
}

Shape Shape::of(std::initializer_list<std::int64_t> dims) {
    std::vector<Dim> out;
    out.reserve(dims.size());
    for (auto d : dims) out.push_back(d < 0 ? Dim::unknown() : Dim::known(d));
    return of(std::move(out));
}

Shape Shape::from_extents(const std::vector<std::int64_t>& extents) {
    std::vector<Dim> out;
    out.reserve(extents.size());
    for (auto d : extents) out.push_back(Dim::known(d));
    return of(std::move(out));
}

Shape Shape::bottom() {
    Shape s;
    s.kind_ = Kind::Bottom;
    return s;
}

bool Shape::fully_known() const {
    return rank_known() &&
           std::all_of(dims_.begin(), dims_.end(), [](const Dim& d) { return d.is_known(); });
}

ShapeCategory Shape::category() const {
    switch (kind_) {
    case Kind::Bottom: return ShapeCategory::Bottom;
    case Kind::RankUnknown: return ShapeCategory::Unknown;
    case Kind::RankKnown: break;
    }
    return fully_known() ? ShapeCategory::Known : ShapeCategory::PartlyKnown;
}

std::optional<std::vector<std::int64_t>> Shape::extents() const {
    if (!fully_known()) return std::nullopt;
    std::vector<std::int64_t> out;
    out.reserve(dims_.size());
    for (const auto& d : dims_) out.push_back(d.value());
    return out;
}

std::string Shape::to_string() const {
    if (is_bottom()) return "\"bottom\"";
    if (rank_unknown()) return "\"?\"";
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < dims_.size(); ++i) {
        if (i) os << ',';
        if (dims_[i].is_known())
            os << dims_[i].value();
        else
            os << "null";
    }
    os << ']';
    return os.str();
}

DesiredShape::DesiredShape(std::vector<std::optional<std::int64_t>> entries)
    : entries_(std::move(entries)) {
    std::size_t wildcards = 0;
    for (const auto& e : entries_) {
        if (!e) {
            ++wildcards;
        } else if (*e < 1 || *e > kMaxDim) {
            throw std::invalid_argument("desired shape entries must be in [1, 2^31-1] or -1");
        }
    }
    if (wildcards > 1) throw std::invalid_argument("desired shape has more than one -1");
}

DesiredShape DesiredShape::from_ints(const std::vector<std::int64_t>& entries) {
    std::vector<std::optional<std::int64_t>> out;
    out.reserve(entries.size());
    for (auto e : entries) {
        if (e == -1)
            out.emplace_back(std::nullopt);
        else
            out.emplace_back(e);
    }
    return DesiredShape(std::move(out));
}

std::optional<std::size_t> DesiredShape::wildcard() const {
    for (std::size_t i = 0; i < entries_.size(); ++i)
        if (!entries_[i]) return i;
    return std::nullopt;
}

std::vector<std::int64_t> DesiredShape::to_ints() const {
    std::vector<std::int64_t> out;
    out.reserve(entries_.size());
    for (const auto& e : entries_) out.push_back(e ? *e : -1);
    return out;
}

Shape shape_meet(const Shape& a, const Shape& b) {
    if (a.is_bottom() || b.is_bottom()) return Shape::bottom();
    if (a.rank_unknown()) return b;
    if (b.rank_unknown()) return a;
    if (a.rank() != b.rank()) return Shape::bottom();
    std::vector<Dim> dims(a.rank());
    for (std::size_t i = 0; i < a.rank(); ++i) {
        const Dim& x = a[i];
        const Dim& y = b[i];
        if (x.is_known() && y.is_known() && x.value() != y.value()) return Shape::bottom();
        dims[i] = x.is_known() ? x : y;
    }
    return Shape::of(std::move(dims));
}

std::optional<std::int64_t> element_count(const Shape& s) {
    if (!s.fully_known()) return std::nullopt;
    std::int64_t count = 1;
    for (const auto& d : s.dims()) {
        if (__builtin_mul_overflow(count, d.value(), &count)) return std::nullopt;
    }
    return count;
}

Shape broadcast(const Shape& a, const Shape& b) {
    if (a.is_bottom() || b.is_bottom()) return Shape::bottom();
    if (a.rank_unknown() || b.rank_unknown()) return Shape::unknown_rank();
    const std::size_t rank = std::max(a.rank(), b.rank());
    std::vector<Dim> dims(rank);
    for (std::size_t i = 0; i < rank; ++i) {
        // i counts from the trailing axis
        const bool in_a = i < a.rank();
        const bool in_b = i < b.rank();
        const Dim x = in_a ? a[a.rank() - 1 - i] : Dim::known(1);
        const Dim y = in_b ? b[b.rank() - 1 - i] : Dim::known(1);
        Dim out;
        if (x.is_known() && x.value() == 1) {
            out = y;
        } else if (y.is_known() && y.value() == 1) {
            out = x;
        } else if (x.is_known() && y.is_known()) {
            if (x.value() != y.value()) return Shape::bottom();
            out = x;
        } else {
            out = Dim::unknown();
        }
        dims[rank - 1 - i] = out;
    }
    return Shape::of(std::move(dims));
}

bool concretizes(const Shape& s, const std::vector<std::int64_t>& extents) {
    if (s.is_bottom()) return false;
    if (s.rank_unknown()) return true;
    if (s.rank() != extents.size()) return false;
    for (std::size_t i = 0; i < extents.size(); ++i)
        if (s[i].is_known() && s[i].value() != extents[i]) return false;
    return true;
}

const char* category_name(ShapeCategory c) {
    switch (c) {
    case ShapeCategory::Known: return "Known";
    case ShapeCategory::PartlyKnown: return "Partly known";
    case ShapeCategory::Unknown: return "Unknown";
    case ShapeCategory::Bottom: return "bottom";
    }
    return "?";
}

}  // namespace shapeprobe
