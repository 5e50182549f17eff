#pragma once
// Referents, taxonomies, utterances and lexicons, plus the Boolean
// conjunctive semantics that ties them together.

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace chai {

// Raised when an argument violates a documented precondition.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Referents are the leaves of a taxonomy, numbered 0..n-1.
using Referent = int;
inline constexpr Referent kNullReferent = -1;

using NodeId = int;
using PrimitiveId = int;

enum class Level { subordinate, basic, superordinate };

std::string_view to_string(Level level);

// Set of referents packed into a bitmask; universes hold at most 32 objects.
class ReferentSet {
public:
    static constexpr int kCapacity = 32;

    constexpr ReferentSet() = default;
    explicit constexpr ReferentSet(std::uint32_t bits) : bits_(bits) {}
    ReferentSet(std::initializer_list<Referent> members);

    static ReferentSet first_n(int n);

    bool contains(Referent r) const {
        return r >= 0 && r < kCapacity && ((bits_ >> r) & 1U) != 0;
    }
    void insert(Referent r);
    int size() const { return std::popcount(bits_); }
    bool empty() const { return bits_ == 0; }
    std::uint32_t bits() const { return bits_; }
    std::vector<Referent> members() const;

    bool includes(ReferentSet other) const { return (bits_ & other.bits_) == other.bits_; }

    friend ReferentSet operator&(ReferentSet a, ReferentSet b) { return ReferentSet(a.bits_ & b.bits_); }
    friend ReferentSet operator|(ReferentSet a, ReferentSet b) { return ReferentSet(a.bits_ | b.bits_); }
    friend bool operator==(ReferentSet, ReferentSet) = default;

private:
    std::uint32_t bits_ = 0;
};

struct TaxonomyNode {
    NodeId id = 0;
    std::string name;
    Level level = Level::subordinate;
    std::vector<NodeId> children;
    ReferentSet extension;
};

// A forest over referents. Leaves occupy node ids 0..leaf_count-1 so that a
// leaf's node id equals its referent id; internal nodes follow.
class Taxonomy {
public:
    // leaf names; basic nodes as lists of leaf ids; superordinate nodes as
    // lists of basic-node indices (0-based into `basic`).
    Taxonomy(std::vector<std::string> leaf_names,
             std::vector<std::vector<int>> basic,
             std::vector<std::vector<int>> super,
             std::vector<std::string> basic_names = {},
             std::vector<std::string> super_names = {});

    // n unrelated objects o1..on.
    static Taxonomy flat(int leaf_count);
    // Four squares: two colours with two shades each, under one shape node.
    static Taxonomy single_branch();
    // Eight objects: squares and circles, each split as in single_branch().
    static Taxonomy two_branch();

    int leaf_count() const { return leaf_count_; }
    int node_count() const { return static_cast<int>(nodes_.size()); }
    const std::vector<TaxonomyNode>& nodes() const { return nodes_; }
    const TaxonomyNode& node(NodeId id) const;
    ReferentSet universe() const { return ReferentSet::first_n(leaf_count_); }
    std::vector<NodeId> roots() const;
    std::vector<NodeId> nodes_at(Level level) const;
    NodeId parent(NodeId id) const;  // -1 for roots

private:
    int leaf_count_ = 0;
    std::vector<TaxonomyNode> nodes_;
    std::vector<NodeId> parents_;
};

// What a primitive label denotes: a taxonomy node or nothing at all.
class Meaning {
public:
    constexpr Meaning() = default;
    static constexpr Meaning empty() { return Meaning(); }
    static constexpr Meaning node(NodeId id) { return Meaning(id); }

    constexpr bool is_empty() const { return node_ < 0; }
    constexpr NodeId node_id() const { return node_; }

    friend constexpr auto operator<=>(Meaning, Meaning) = default;

private:
    constexpr explicit Meaning(NodeId id) : node_(id) {}
    NodeId node_ = -1;
};

// One or two distinct primitives. Stored sorted, so u1u2 and u2u1 are the
// same utterance.
class Utterance {
public:
    static constexpr int kMaxLength = 2;

    Utterance(std::initializer_list<PrimitiveId> primitives);
    explicit Utterance(std::span<const PrimitiveId> primitives);

    std::span<const PrimitiveId> primitives() const { return {prims_.data(), static_cast<std::size_t>(size_)}; }
    int length() const { return size_; }

    friend bool operator==(const Utterance& a, const Utterance& b) {
        return a.size_ == b.size_ && a.prims_ == b.prims_;
    }
    friend auto operator<=>(const Utterance& a, const Utterance& b) {
        if (auto c = a.size_ <=> b.size_; c != 0) return c;
        return a.prims_ <=> b.prims_;
    }

private:
    std::array<PrimitiveId, kMaxLength> prims_{-1, -1};
    int size_ = 0;
};

// Total assignment from primitive id to meaning.
class Lexicon {
public:
    Lexicon() = default;
    explicit Lexicon(std::vector<Meaning> assignment) : assignment_(std::move(assignment)) {}

    int size() const { return static_cast<int>(assignment_.size()); }
    const Meaning& at(PrimitiveId p) const;
    Meaning operator[](PrimitiveId p) const { return assignment_[static_cast<std::size_t>(p)]; }
    const std::vector<Meaning>& assignment() const { return assignment_; }

    friend auto operator<=>(const Lexicon&, const Lexicon&) = default;
    friend bool operator==(const Lexicon&, const Lexicon&) = default;

private:
    std::vector<Meaning> assignment_;
};

// Real referents on display. The null referent is implicitly always present
// for literal interpretation.
struct Context {
    ReferentSet real;
    bool includes_null = true;
};

struct TrialRecord {
    int trajectory = 0;
    std::string partner_pair;  // e.g. "0-1"
    int speaker = 0;
    int listener = 1;
    int trial = 0;
    int block = 0;
    Referent target = 0;
    Utterance utterance{0};
    Referent response = 0;
    bool correct = false;
};

// Primitive label names, e.g. u1..u8.
class Vocabulary {
public:
    explicit Vocabulary(std::vector<std::string> names);
    static Vocabulary numbered(int count);  // u1..u<count>

    int size() const { return static_cast<int>(names_.size()); }
    const std::string& name(PrimitiveId p) const;
    PrimitiveId id_of(std::string_view name) const;

    // Primitive names joined with '+', e.g. "u1+u2".
    std::string encode(const Utterance& u) const;
    Utterance decode(std::string_view text) const;

private:
    std::vector<std::string> names_;
};

struct DomainSpec {
    Taxonomy taxonomy;
    Vocabulary vocabulary;
};

// { "leaves": [...], "basic": [[leaf,leaf],...], "super": [[basic,...],...],
//   "primitives": ["u1",...] }
DomainSpec domain_from_json(const nlohmann::json& doc);
nlohmann::json domain_to_json(const DomainSpec& spec);

ReferentSet extension(Meaning m, const Taxonomy& tax);

// Referents satisfying every primitive of u under lex.
ReferentSet utterance_extension(const Lexicon& lex, const Utterance& u, const Taxonomy& tax);

// 1 iff r satisfies every primitive of u; the null referent satisfies everything.
int truth_value(const Lexicon& lex, const Utterance& u, Referent r, const Taxonomy& tax);

// A conjunction whose conjuncts each denote something in `universe` but which
// jointly denote nothing. Single words are never contradictions: an empty
// word is a failure to refer, absorbed by the null referent.
bool is_contradiction(const Lexicon& lex, const Utterance& u, ReferentSet universe, const Taxonomy& tax);

double utterance_cost(const Utterance& u);

enum class CandidateSet { singles, singles_and_pairs };

// Singles u1..un, then (optionally) every unordered pair in lexicographic order.
std::vector<Utterance> candidate_utterances(int primitive_count, CandidateSet kind);

}  // namespace chai
