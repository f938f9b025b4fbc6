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

// Abstract tensor shapes: each dimension is either a known extent or
// unknown, the rank itself may be unknown, and Bottom marks a shape error.
// Bottom is an ordinary value here; the session turns it into a diagnostic.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

namespace shapeprobe {

/// Largest extent accepted for a single dimension.
inline constexpr std::int64_t kMaxDim = 2147483647;

class Dim {
public:
    constexpr Dim() = default;

    static constexpr Dim known(std::int64_t n) { return Dim(n); }
    static constexpr Dim unknown() { return Dim(); }

    constexpr bool is_known() const { return value_ >= 0; }
    constexpr std::int64_t value() const { return value_; }

    constexpr bool operator==(const Dim&) const = default;

private:
    constexpr explicit Dim(std::int64_t n) : value_(n < 0 ? -1 : n) {}
    std::int64_t value_ = -1;
};

/// Coarse classification used by the reshape and reduce tables.
enum class ShapeCategory { Known, PartlyKnown, Unknown, Bottom };

class Shape {
public:
    enum class Kind : std::uint8_t { RankKnown, RankUnknown, Bottom };

    /// Defaults to the unknown-rank shape (the top of the domain).
    Shape() = default;

    static Shape of(std::vector<Dim> dims);
    /// Convenience for tests and literals: negative entries mean Unknown.
    static Shape of(std::initializer_list<std::int64_t> dims);
    static Shape from_extents(const std::vector<std::int64_t>& extents);
    static Shape scalar() { return of(std::vector<Dim>{}); }
    static Shape unknown_rank() { return Shape(); }
    static Shape bottom();

    Kind kind() const { return kind_; }
    bool is_bottom() const { return kind_ == Kind::Bottom; }
    bool rank_known() const { return kind_ == Kind::RankKnown; }
    bool rank_unknown() const { return kind_ == Kind::RankUnknown; }

    /// Only meaningful when rank_known().
    std::size_t rank() const { return dims_.size(); }
    const std::vector<Dim>& dims() const { return dims_; }
    const Dim& operator[](std::size_t axis) const { return dims_[axis]; }

    bool fully_known() const;
    ShapeCategory category() const;

    /// Extents of a fully known shape.
    std::optional<std::vector<std::int64_t>> extents() const;

    /// IR literal form: `[null,784]`, `"?"`, or `"bottom"`.
    std::string to_string() const;

    bool operator==(const Shape&) const = default;

private:
    Kind kind_ = Kind::RankUnknown;
    std::vector<Dim> dims_;
};

/// A requested output shape where one entry may be a wildcard (-1).
class DesiredShape {
public:
    /// Throws std::invalid_argument when more than one wildcard is present or
    /// an explicit entry is below 1. Wildcards are written as nullopt.
    explicit DesiredShape(std::vector<std::optional<std::int64_t>> entries);

    /// Parses the conventional integer form where -1 marks the wildcard.
    static DesiredShape from_ints(const std::vector<std::int64_t>& entries);

    const std::vector<std::optional<std::int64_t>>& entries() const { return entries_; }
    std::optional<std::size_t> wildcard() const;
    std::vector<std::int64_t> to_ints() const;

    bool operator==(const DesiredShape&) const = default;

private:
    std::vector<std::optional<std::int64_t>> entries_;
};

/// Greatest lower bound; conflicting information yields Bottom.
Shape shape_meet(const Shape& a, const Shape& b);

/// Product of the dims of a fully known shape. Absent for anything else, and
/// also when the product does not fit in 64 bits.
std::optional<std::int64_t> element_count(const Shape& s);

/// Right-aligned broadcasting of two operands.
Shape broadcast(const Shape& a, const Shape& b);

/// Whether the concrete extents are a member of the concretization of `s`.
bool concretizes(const Shape& s, const std::vector<std::int64_t>& extents);

const char* category_name(ShapeCategory c);

}  // namespace shapeprobe
