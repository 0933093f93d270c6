#ifndef SDGLAB_QUERY_HPP
#define SDGLAB_QUERY_HPP

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdglab {

enum class FieldSel : uint8_t { Title, Abstract, Keywords, Any };

const char* field_sel_name(FieldSel f);

enum class NodeKind : uint8_t { Term, Phrase, Near, And, Or, Not, FieldScope };

struct QueryNode;
using QueryAst = std::unique_ptr<QueryNode>;

struct QueryNode {
    NodeKind kind;

    // Term
    std::string stem;
    bool wildcard = false;

    // Phrase: tokenized terms in order
    std::vector<std::string> terms;

    // Near: children[0], children[1]
    int window = 0;
    bool ordered = false;

    // FieldScope: children[0]
    FieldSel field = FieldSel::Any;

    std::vector<QueryAst> children;
};

struct ParseError : std::runtime_error {
    size_t offset;
    ParseError(const std::string& msg, size_t off)
        : std::runtime_error(msg + " (at byte " + std::to_string(off) + ")"), offset(off) {}
};

// Grammar: OR < AND < NOT < NEAR/W < atom. Double-quoted phrases, trailing
// `*` wildcard, parentheses, `title:` / `abstract:` / `keywords:` prefixes.
// Operators are uppercase; lowercase words are terms.
QueryAst parse_query(const std::string& source);

// Canonical form; parse_query(print_query(ast)) reproduces the AST.
std::string print_query(const QueryNode& ast);

bool ast_equal(const QueryNode& a, const QueryNode& b);

QueryAst clone_ast(const QueryNode& ast);

struct Literal {
    std::string stem;
    bool wildcard = false;
    bool operator==(const Literal&) const = default;
};

struct QueryLiterals {
    std::vector<Literal> positives;  // outside any NOT subtree, deduplicated
    std::vector<Literal> negatives;  // inside NOT subtrees
};

QueryLiterals query_literals(const QueryNode& ast);

struct SystemEntry {
    int sdg = 0;  // 1..17
    std::string query_id;
    QueryAst query;
};

struct SystemDef {
    std::string name;
    std::vector<SystemEntry> entries;
};

// CSV header: system,sdg,query_id,query. Any invalid row aborts the load.
std::vector<SystemDef> load_systems(const std::string& path);

}  // namespace sdglab

#endif
