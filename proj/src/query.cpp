#include "sdglab/query.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sdglab/corpus.hpp"
#include "sdglab/csv.hpp"

namespace sdglab {

const char* field_sel_name(FieldSel f) {
    switch (f) {
        case FieldSel::Title: return "title";
        case FieldSel::Abstract: return "abstract";
        case FieldSel::Keywords: return "keywords";
        case FieldSel::Any: return "any";
    }
    return "?";
}

namespace {

enum class TokKind { LParen, RParen, And, Or, Not, Near, Within, Field, Phrase, Term, End };

struct Tok {
    TokKind kind;
    size_t offset = 0;
    std::string text;       // raw term word or phrase content
    bool wildcard = false;  // Term
    int window = 0;         // Near/Within
    FieldSel field = FieldSel::Any;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) {}

    std::vector<Tok> run() {
        std::vector<Tok> toks;
        while (true) {
            Tok t = next();
            bool end = t.kind == TokKind::End;
            toks.push_back(std::move(t));
            if (end) break;
        }
        return toks;
    }

private:
    const std::string& src_;
    size_t pos_ = 0;

    static bool is_delim(char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '(' || c == ')' ||
               c == '"' || c == ':';
    }

    Tok next() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        size_t start = pos_;
        if (pos_ >= src_.size()) return {TokKind::End, start};
        char c = src_[pos_];
        if (c == '(') { ++pos_; return {TokKind::LParen, start}; }
        if (c == ')') { ++pos_; return {TokKind::RParen, start}; }
        if (c == ':') throw ParseError("unexpected ':'", start);
        if (c == '"') {
            ++pos_;
            size_t close = src_.find('"', pos_);
            if (close == std::string::npos) throw ParseError("unterminated phrase", start);
            Tok t{TokKind::Phrase, start, src_.substr(pos_, close - pos_)};
            pos_ = close + 1;
            return t;
        }

        size_t end = pos_;
        while (end < src_.size() && !is_delim(src_[end])) ++end;
        std::string word = src_.substr(pos_, end - pos_);
        pos_ = end;

        if (pos_ < src_.size() && src_[pos_] == ':') {
            ++pos_;
            Tok t{TokKind::Field, start};
            if (word == "title") t.field = FieldSel::Title;
            else if (word == "abstract") t.field = FieldSel::Abstract;
            else if (word == "keywords") t.field = FieldSel::Keywords;
            else throw ParseError("unknown field '" + word + "'", start);
            return t;
        }

        if (word == "AND") return {TokKind::And, start};
        if (word == "OR") return {TokKind::Or, start};
        if (word == "NOT") return {TokKind::Not, start};
        for (auto [prefix, kind] : {std::pair{"NEAR/", TokKind::Near}, std::pair{"W/", TokKind::Within}}) {
            if (word.rfind(prefix, 0) == 0) {
                Tok t{kind, start};
                const std::string num = word.substr(std::string(prefix).size());
                try {
                    t.window = std::stoi(num);
                } catch (...) {
                    throw ParseError("bad proximity window '" + num + "'", start);
                }
                if (t.window < 1) throw ParseError("proximity window must be >= 1", start);
                return t;
            }
        }

        Tok t{TokKind::Term, start, word};
        if (!word.empty() && word.back() == '*') {
            t.wildcard = true;
            t.text.pop_back();
        }
        if (t.text.find('*') != std::string::npos)
            throw ParseError("wildcard '*' only allowed at end of term", start);
        if (t.text.empty()) throw ParseError("empty term", start);
        return t;
    }
};

class Parser {
public:
    explicit Parser(std::vector<Tok> toks) : toks_(std::move(toks)) {}

    QueryAst run() {
        QueryAst ast = parse_or();
        expect(TokKind::End, "trailing input");
        return ast;
    }

private:
    std::vector<Tok> toks_;
    size_t i_ = 0;

    const Tok& peek() const { return toks_[i_]; }
    Tok take() { return toks_[i_++]; }
    void expect(TokKind k, const char* what) {
        if (peek().kind != k) throw ParseError(std::string("expected ") + what, peek().offset);
        ++i_;
    }

    QueryAst parse_or() {
        std::vector<QueryAst> children;
        children.push_back(parse_and());
        while (peek().kind == TokKind::Or) {
            take();
            children.push_back(parse_and());
        }
        if (children.size() == 1) return std::move(children[0]);
        auto node = std::make_unique<QueryNode>();
        node->kind = NodeKind::Or;
        node->children = std::move(children);
        return node;
    }

    QueryAst parse_and() {
        std::vector<QueryAst> children;
        children.push_back(parse_unary());
        while (peek().kind == TokKind::And) {
            take();
            children.push_back(parse_unary());
        }
        if (children.size() == 1) return std::move(children[0]);
        auto node = std::make_unique<QueryNode>();
        node->kind = NodeKind::And;
        node->children = std::move(children);
        return node;
    }

    QueryAst parse_unary() {
        if (peek().kind == TokKind::Not) {
            take();
            auto node = std::make_unique<QueryNode>();
            node->kind = NodeKind::Not;
            node->children.push_back(parse_unary());
            return node;
        }
        return parse_prox();
    }

    QueryAst parse_prox() {
        QueryAst left = parse_atom();
        if (peek().kind == TokKind::Near || peek().kind == TokKind::Within) {
            Tok op = take();
            QueryAst right = parse_atom();
            for (const QueryAst* side : {&left, &right}) {
                NodeKind k = (*side)->kind;
                if (k != NodeKind::Term && k != NodeKind::Phrase)
                    throw ParseError("proximity operands must be terms or phrases", op.offset);
            }
            auto node = std::make_unique<QueryNode>();
            node->kind = NodeKind::Near;
            node->window = op.window;
            node->ordered = op.kind == TokKind::Within;
            node->children.push_back(std::move(left));
            node->children.push_back(std::move(right));
            return node;
        }
        return left;
    }

    QueryAst parse_atom() {
        const Tok& t = peek();
        switch (t.kind) {
            case TokKind::LParen: {
                take();
                QueryAst inner = parse_or();
                expect(TokKind::RParen, "')'");
                return inner;
            }
            case TokKind::Field: {
                Tok f = take();
                auto node = std::make_unique<QueryNode>();
                node->kind = NodeKind::FieldScope;
                node->field = f.field;
                node->children.push_back(parse_atom());
                return node;
            }
            case TokKind::Phrase: {
                Tok p = take();
                auto toks = tokenize(p.text);
                if (toks.empty()) throw ParseError("empty phrase", p.offset);
                auto node = std::make_unique<QueryNode>();
                if (toks.size() == 1) {
                    node->kind = NodeKind::Term;
                    node->stem = std::move(toks[0]);
                } else {
                    node->kind = NodeKind::Phrase;
                    node->terms = std::move(toks);
                }
                return node;
            }
            case TokKind::Term: {
                Tok w = take();
                auto toks = tokenize(w.text);
                if (toks.empty()) throw ParseError("term has no tokens", w.offset);
                auto node = std::make_unique<QueryNode>();
                if (toks.size() == 1) {
                    node->kind = NodeKind::Term;
                    node->stem = std::move(toks[0]);
                    node->wildcard = w.wildcard;
                    if (node->wildcard && node->stem.size() < 3)
                        throw ParseError("wildcard stem must be at least 3 characters", w.offset);
                } else {
                    if (w.wildcard) throw ParseError("wildcard not allowed on multi-token term", w.offset);
                    node->kind = NodeKind::Phrase;
                    node->terms = std::move(toks);
                }
                return node;
            }
            default:
                throw ParseError("expected term, phrase, '(' or field prefix", t.offset);
        }
    }
};

void validate_not_placement(const QueryNode& node, const QueryNode* parent) {
    if (node.kind == NodeKind::Not) {
        if (parent == nullptr) throw ParseError("top-level negation", 0);
        if (parent->kind != NodeKind::And)
            throw ParseError("NOT is only allowed as a direct operand of AND", 0);
    }
    for (const auto& c : node.children) validate_not_placement(*c, &node);
}

}  // namespace

QueryAst parse_query(const std::string& source) {
    if (source.find_first_not_of(" \t\r\n") == std::string::npos)
        throw ParseError("empty query", 0);
    Parser parser(Lexer(source).run());
    QueryAst ast = parser.run();
    validate_not_placement(*ast, nullptr);
    return ast;
}

namespace {

std::string join_terms(const std::vector<std::string>& terms) {
    std::string out;
    for (size_t i = 0; i < terms.size(); ++i) {
        if (i) out.push_back(' ');
        out += terms[i];
    }
    return out;
}

}  // namespace

std::string print_query(const QueryNode& ast) {
    switch (ast.kind) {
        case NodeKind::Term:
            return ast.stem + (ast.wildcard ? "*" : "");
        case NodeKind::Phrase:
            return "\"" + join_terms(ast.terms) + "\"";
        case NodeKind::Near:
            return print_query(*ast.children[0]) + (ast.ordered ? " W/" : " NEAR/") +
                   std::to_string(ast.window) + " " + print_query(*ast.children[1]);
        case NodeKind::Not: {
            const QueryNode& c = *ast.children[0];
            bool parens = c.kind == NodeKind::And || c.kind == NodeKind::Or;
            return parens ? "NOT (" + print_query(c) + ")" : "NOT " + print_query(c);
        }
        case NodeKind::And: {
            std::string out;
            for (size_t i = 0; i < ast.children.size(); ++i) {
                const QueryNode& c = *ast.children[i];
                if (i) out += " AND ";
                // parens keep a nested AND from being flattened on reparse
                bool parens = c.kind == NodeKind::Or || c.kind == NodeKind::And;
                out += parens ? "(" + print_query(c) + ")" : print_query(c);
            }
            return out;
        }
        case NodeKind::Or: {
            std::string out;
            for (size_t i = 0; i < ast.children.size(); ++i) {
                const QueryNode& c = *ast.children[i];
                if (i) out += " OR ";
                out += c.kind == NodeKind::Or ? "(" + print_query(c) + ")" : print_query(c);
            }
            return out;
        }
        case NodeKind::FieldScope: {
            const QueryNode& c = *ast.children[0];
            std::string name = field_sel_name(ast.field);
            bool bare = c.kind == NodeKind::Term || c.kind == NodeKind::Phrase;
            return bare ? name + ":" + print_query(c) : name + ":(" + print_query(c) + ")";
        }
    }
    return "";
}

bool ast_equal(const QueryNode& a, const QueryNode& b) {
    if (a.kind != b.kind || a.stem != b.stem || a.wildcard != b.wildcard || a.terms != b.terms ||
        a.window != b.window || a.ordered != b.ordered || a.field != b.field ||
        a.children.size() != b.children.size())
        return false;
    for (size_t i = 0; i < a.children.size(); ++i)
        if (!ast_equal(*a.children[i], *b.children[i])) return false;
    return true;
}

QueryAst clone_ast(const QueryNode& ast) {
    auto node = std::make_unique<QueryNode>();
    node->kind = ast.kind;
    node->stem = ast.stem;
    node->wildcard = ast.wildcard;
    node->terms = ast.terms;
    node->window = ast.window;
    node->ordered = ast.ordered;
    node->field = ast.field;
    for (const auto& c : ast.children) node->children.push_back(clone_ast(*c));
    return node;
}

namespace {

void collect_literals(const QueryNode& node, bool negated, QueryLiterals& out,
                      std::set<std::pair<std::string, bool>>& seen_pos,
                      std::set<std::pair<std::string, bool>>& seen_neg) {
    auto add = [&](const std::string& stem, bool wildcard) {
        auto& seen = negated ? seen_neg : seen_pos;
        if (!seen.emplace(stem, wildcard).second) return;
        (negated ? out.negatives : out.positives).push_back({stem, wildcard});
    };
    switch (node.kind) {
        case NodeKind::Term:
            add(node.stem, node.wildcard);
            break;
        case NodeKind::Phrase:
            for (const auto& t : node.terms) add(t, false);
            break;
        case NodeKind::Not:
            collect_literals(*node.children[0], !negated, out, seen_pos, seen_neg);
            break;
        default:
            for (const auto& c : node.children)
                collect_literals(*c, negated, out, seen_pos, seen_neg);
    }
}

}  // namespace

QueryLiterals query_literals(const QueryNode& ast) {
    QueryLiterals out;
    std::set<std::pair<std::string, bool>> seen_pos, seen_neg;
    collect_literals(ast, false, out, seen_pos, seen_neg);
    return out;
}

std::vector<SystemDef> load_systems(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open systems file: " + path);
    auto header = csv::read_record(in);
    if (!header || header->size() < 4 || (*header)[0] != "system")
        throw std::runtime_error("systems CSV needs header system,sdg,query_id,query");

    std::vector<SystemDef> systems;
    std::map<std::string, size_t> by_name;
    std::map<std::string, std::set<std::string>> seen_ids;
    size_t lineno = 1;
    while (auto row = csv::read_record(in)) {
        ++lineno;
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() < 4)
            throw std::runtime_error("systems row " + std::to_string(lineno) + " has fewer than 4 columns");
        const std::string& name = (*row)[0];
        if (name.empty())
            throw std::runtime_error("systems row " + std::to_string(lineno) + ": empty system name");
        int sdg = 0;
        try {
            sdg = std::stoi((*row)[1]);
        } catch (...) {}
        if (sdg < 1 || sdg > 17)
            throw std::runtime_error("systems row " + std::to_string(lineno) + ": sdg '" + (*row)[1] +
                                     "' out of range 1..17");
        const std::string& qid = (*row)[2];
        if (!seen_ids[name].insert(qid).second)
            throw std::runtime_error("system " + name + ": duplicate query_id '" + qid + "'");

        QueryAst ast;
        try {
            ast = parse_query((*row)[3]);
        } catch (const std::exception& e) {
            throw std::runtime_error("system " + name + ", query " + qid + ": " + e.what());
        }

        auto it = by_name.find(name);
        if (it == by_name.end()) {
            by_name.emplace(name, systems.size());
            systems.push_back({name, {}});
            it = by_name.find(name);
        }
        systems[it->second].entries.push_back({sdg, qid, std::move(ast)});
    }
    return systems;
}

}  // namespace sdglab
