#include "chai/domain.hpp"

#include <algorithm>

namespace chai {

std::string_view to_string(Level level) {
    switch (level) {
        case Level::subordinate: return "subordinate";
        case Level::basic: return "basic";
        case Level::superordinate: return "superordinate";
    }
    return "?";
}

ReferentSet::ReferentSet(std::initializer_list<Referent> members) {
    for (Referent r : members) insert(r);
}

ReferentSet ReferentSet::first_n(int n) {
    if (n < 0 || n > kCapacity) throw DomainError("referent universe size out of range");
    return ReferentSet(n == kCapacity ? ~0U : ((1U << n) - 1U));
}

void ReferentSet::insert(Referent r) {
    if (r < 0 || r >= kCapacity) throw DomainError("referent id out of range: " + std::to_string(r));
    bits_ |= (1U << r);
}

std::vector<Referent> ReferentSet::members() const {
    std::vector<Referent> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(std::countr_zero(b));
    return out;
}

// ---------------------------------------------------------------------------

Taxonomy::Taxonomy(std::vector<std::string> leaf_names,
                   std::vector<std::vector<int>> basic,
                   std::vector<std::vector<int>> super,
                   std::vector<std::string> basic_names,
                   std::vector<std::string> super_names) {
    leaf_count_ = static_cast<int>(leaf_names.size());
    if (leaf_count_ < 1 || leaf_count_ > ReferentSet::kCapacity)
        throw DomainError("taxonomy needs between 1 and 32 leaves");

    for (int i = 0; i < leaf_count_; ++i) {
        TaxonomyNode n;
        n.id = i;
        n.name = std::move(leaf_names[static_cast<std::size_t>(i)]);
        n.level = Level::subordinate;
        n.extension = ReferentSet({i});
        nodes_.push_back(std::move(n));
    }
    parents_.assign(static_cast<std::size_t>(leaf_count_), -1);

    const int basic_base = leaf_count_;
    for (std::size_t b = 0; b < basic.size(); ++b) {
        TaxonomyNode n;
        n.id = static_cast<NodeId>(nodes_.size());
        n.name = b < basic_names.size() ? basic_names[b] : "b" + std::to_string(b + 1);
        n.level = Level::basic;
        if (basic[b].empty()) throw DomainError("basic node without children");
        for (int leaf : basic[b]) {
            if (leaf < 0 || leaf >= leaf_count_) throw DomainError("basic node references unknown leaf");
            if (parents_[static_cast<std::size_t>(leaf)] != -1) throw DomainError("leaf has two parents");
            parents_[static_cast<std::size_t>(leaf)] = n.id;
            n.children.push_back(leaf);
            n.extension.insert(leaf);
        }
        nodes_.push_back(std::move(n));
        parents_.push_back(-1);
    }

    for (std::size_t s = 0; s < super.size(); ++s) {
        TaxonomyNode n;
        n.id = static_cast<NodeId>(nodes_.size());
        n.name = s < super_names.size() ? super_names[s] : "s" + std::to_string(s + 1);
        n.level = Level::superordinate;
        if (super[s].empty()) throw DomainError("superordinate node without children");
        for (int bi : super[s]) {
            if (bi < 0 || bi >= static_cast<int>(basic.size()))
                throw DomainError("superordinate node references unknown basic node");
            const NodeId child = basic_base + bi;
            if (parents_[static_cast<std::size_t>(child)] != -1) throw DomainError("basic node has two parents");
            parents_[static_cast<std::size_t>(child)] = n.id;
            n.children.push_back(child);
            n.extension = n.extension | nodes_[static_cast<std::size_t>(child)].extension;
        }
        nodes_.push_back(std::move(n));
        parents_.push_back(-1);
    }
}

Taxonomy Taxonomy::flat(int leaf_count) {
    std::vector<std::string> names;
    for (int i = 0; i < leaf_count; ++i) names.push_back("o" + std::to_string(i + 1));
    return Taxonomy(std::move(names), {}, {});
}

Taxonomy Taxonomy::single_branch() {
    return Taxonomy({"light_blue_square", "dark_blue_square", "light_red_square", "dark_red_square"},
                    {{0, 1}, {2, 3}}, {{0, 1}},
                    {"blue_square", "red_square"}, {"square"});
}

Taxonomy Taxonomy::two_branch() {
    return Taxonomy({"light_blue_square", "dark_blue_square", "light_red_square", "dark_red_square",
                     "light_striped_circle", "dark_striped_circle", "light_spotted_circle",
                     "dark_spotted_circle"},
                    {{0, 1}, {2, 3}, {4, 5}, {6, 7}}, {{0, 1}, {2, 3}},
                    {"blue_square", "red_square", "striped_circle", "spotted_circle"},
                    {"square", "circle"});
}

const TaxonomyNode& Taxonomy::node(NodeId id) const {
    if (id < 0 || id >= node_count()) throw DomainError("unknown taxonomy node: " + std::to_string(id));
    return nodes_[static_cast<std::size_t>(id)];
}

std::vector<NodeId> Taxonomy::roots() const {
    std::vector<NodeId> out;
    for (int i = 0; i < node_count(); ++i)
        if (parents_[static_cast<std::size_t>(i)] == -1) out.push_back(i);
    return out;
}

std::vector<NodeId> Taxonomy::nodes_at(Level level) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_)
        if (n.level == level) out.push_back(n.id);
    return out;
}

NodeId Taxonomy::parent(NodeId id) const {
    node(id);
    return parents_[static_cast<std::size_t>(id)];
}

// ---------------------------------------------------------------------------

namespace {

void check_primitives(std::span<const PrimitiveId> prims) {
    if (prims.empty()) throw DomainError("utterance must contain at least one primitive");
    if (static_cast<int>(prims.size()) > Utterance::kMaxLength)
        throw DomainError("utterances are limited to two primitives");
    for (PrimitiveId p : prims)
        if (p < 0) throw DomainError("negative primitive id");
    if (prims.size() == 2 && prims[0] == prims[1]) throw DomainError("repeated primitive in utterance");
}

}  // namespace

Utterance::Utterance(std::initializer_list<PrimitiveId> primitives)
    : Utterance(std::span<const PrimitiveId>(primitives.begin(), primitives.size())) {}

Utterance::Utterance(std::span<const PrimitiveId> primitives) {
    check_primitives(primitives);
    size_ = static_cast<int>(primitives.size());
    std::copy(primitives.begin(), primitives.end(), prims_.begin());
    std::sort(prims_.begin(), prims_.begin() + size_);
}

const Meaning& Lexicon::at(PrimitiveId p) const {
    if (p < 0 || p >= size()) throw DomainError("primitive " + std::to_string(p) + " not in lexicon domain");
    return assignment_[static_cast<std::size_t>(p)];
}

// ---------------------------------------------------------------------------

Vocabulary::Vocabulary(std::vector<std::string> names) : names_(std::move(names)) {
    if (names_.empty()) throw DomainError("vocabulary must not be empty");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i].empty() || names_[i].find('+') != std::string::npos)
            throw DomainError("primitive names must be non-empty and free of '+'");
        for (std::size_t j = 0; j < i; ++j)
            if (names_[i] == names_[j]) throw DomainError("duplicate primitive name: " + names_[i]);
    }
}

Vocabulary Vocabulary::numbered(int count) {
    std::vector<std::string> names;
    for (int i = 0; i < count; ++i) names.push_back("u" + std::to_string(i + 1));
    return Vocabulary(std::move(names));
}

const std::string& Vocabulary::name(PrimitiveId p) const {
    if (p < 0 || p >= size()) throw DomainError("unknown primitive id: " + std::to_string(p));
    return names_[static_cast<std::size_t>(p)];
}

PrimitiveId Vocabulary::id_of(std::string_view name) const {
    for (std::size_t i = 0; i < names_.size(); ++i)
        if (names_[i] == name) return static_cast<PrimitiveId>(i);
    throw DomainError("unknown primitive name: " + std::string(name));
}

std::string Vocabulary::encode(const Utterance& u) const {
    std::string out;
    for (PrimitiveId p : u.primitives()) {
        if (!out.empty()) out += '+';
        out += name(p);
    }
    return out;
}

Utterance Vocabulary::decode(std::string_view text) const {
    std::vector<PrimitiveId> prims;
    std::size_t start = 0;
    while (true) {
        const std::size_t plus = text.find('+', start);
        prims.push_back(id_of(text.substr(start, plus == std::string_view::npos ? text.npos : plus - start)));
        if (plus == std::string_view::npos) break;
        start = plus + 1;
    }
    return Utterance(std::span<const PrimitiveId>(prims));
}

// ---------------------------------------------------------------------------

DomainSpec domain_from_json(const nlohmann::json& doc) {
    try {
        auto leaves = doc.at("leaves").get<std::vector<std::string>>();
        auto basic = doc.value("basic", std::vector<std::vector<int>>{});
        auto super = doc.value("super", std::vector<std::vector<int>>{});
        auto basic_names = doc.value("basic_names", std::vector<std::string>{});
        auto super_names = doc.value("super_names", std::vector<std::string>{});
        auto prims = doc.at("primitives").get<std::vector<std::string>>();
        return DomainSpec{Taxonomy(std::move(leaves), std::move(basic), std::move(super),
                                   std::move(basic_names), std::move(super_names)),
                          Vocabulary(std::move(prims))};
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("malformed domain document: ") + e.what());
    }
}

nlohmann::json domain_to_json(const DomainSpec& spec) {
    const Taxonomy& tax = spec.taxonomy;
    nlohmann::json leaves = nlohmann::json::array(), basic = nlohmann::json::array(),
                   super = nlohmann::json::array(), basic_names = nlohmann::json::array(),
                   super_names = nlohmann::json::array(), prims = nlohmann::json::array();
    const auto basics = tax.nodes_at(Level::basic);
    for (const auto& n : tax.nodes()) {
        if (n.level == Level::subordinate) {
            leaves.push_back(n.name);
        } else if (n.level == Level::basic) {
            basic.push_back(n.children);
            basic_names.push_back(n.name);
        } else {
            nlohmann::json kids = nlohmann::json::array();
            for (NodeId c : n.children)
                kids.push_back(std::find(basics.begin(), basics.end(), c) - basics.begin());
            super.push_back(kids);
            super_names.push_back(n.name);
        }
    }
    for (int p = 0; p < spec.vocabulary.size(); ++p) prims.push_back(spec.vocabulary.name(p));
    return {{"leaves", leaves}, {"basic", basic}, {"super", super}, {"basic_names", basic_names},
            {"super_names", super_names}, {"primitives", prims}};
}

// ---------------------------------------------------------------------------

ReferentSet extension(Meaning m, const Taxonomy& tax) {
    if (m.is_empty()) return {};
    return tax.node(m.node_id()).extension;
}

ReferentSet utterance_extension(const Lexicon& lex, const Utterance& u, const Taxonomy& tax) {
    ReferentSet ext = tax.universe();
    for (PrimitiveId p : u.primitives()) ext = ext & extension(lex.at(p), tax);
    return ext;
}

int truth_value(const Lexicon& lex, const Utterance& u, Referent r, const Taxonomy& tax) {
    const ReferentSet ext = utterance_extension(lex, u, tax);
    if (r == kNullReferent) return 1;
    if (r < 0 || r >= tax.leaf_count()) throw DomainError("unknown referent: " + std::to_string(r));
    return ext.contains(r) ? 1 : 0;
}

bool is_contradiction(const Lexicon& lex, const Utterance& u, ReferentSet universe, const Taxonomy& tax) {
    if (u.length() < 2) {
        lex.at(u.primitives()[0]);
        return false;
    }
    ReferentSet joint = universe;
    for (PrimitiveId p : u.primitives()) {
        const ReferentSet ext = extension(lex.at(p), tax) & universe;
        if (ext.empty()) return false;
        joint = joint & ext;
    }
    return joint.empty();
}

double utterance_cost(const Utterance& u) { return static_cast<double>(u.length()); }

std::vector<Utterance> candidate_utterances(int primitive_count, CandidateSet kind) {
    if (primitive_count < 1) throw DomainError("need at least one primitive");
    std::vector<Utterance> out;
    for (PrimitiveId p = 0; p < primitive_count; ++p) out.push_back(Utterance{p});
    if (kind == CandidateSet::singles_and_pairs)
        for (PrimitiveId a = 0; a < primitive_count; ++a)
            for (PrimitiveId b = a + 1; b < primitive_count; ++b) out.push_back(Utterance{a, b});
    return out;
}

}  // namespace chai
