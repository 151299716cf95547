#include <cctype>
#include <string>
#include <vector>

#include "cais/io.hpp"
#include "cais/risk_model.hpp"

namespace cais::model {
namespace {

enum class Tok { kWord, kNumber, kString, kPunct, kInvalid, kEnd };

struct Token {
  Tok type = Tok::kEnd;
  std::string text;
  SourcePos pos;
};

bool is_word_start(unsigned char c) { return std::isalpha(c) || c == '_' || c >= 0x80; }

bool is_word_char(unsigned char c) {
  return std::isalnum(c) || c == '_' || c == '.' || c == '/' || c == '%' || c == '^' ||
         c == '*' || c >= 0x80;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.pos = {line_, col_};
      if (i_ >= src_.size()) {
        t.type = Tok::kEnd;
        out.push_back(t);
        return out;
      }
      const unsigned char c = src_[i_];
      if (is_word_start(c)) {
        t.type = Tok::kWord;
        while (i_ < src_.size() && is_word_char(src_[i_])) t.text += take();
      } else if (std::isdigit(c) || ((c == '-' || c == '+' || c == '.') && starts_number())) {
        t.type = Tok::kNumber;
        t.text += take();
        while (i_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[i_])) ||
                                    src_[i_] == '.' ||
                                    ((src_[i_] == '-' || src_[i_] == '+') &&
                                     (src_[i_ - 1] == 'e' || src_[i_ - 1] == 'E')))) {
          t.text += take();
        }
      } else if (c == '"') {
        take();
        t.type = Tok::kString;
        bool closed = false;
        while (i_ < src_.size()) {
          char d = take();
          if (d == '"') {
            closed = true;
            break;
          }
          if (d == '\\' && i_ < src_.size()) {
            const char e = take();
            d = e == 'n' ? '\n' : e;
          }
          t.text += d;
        }
        if (!closed) {
          t.type = Tok::kInvalid;
          t.text = "unterminated string";
        }
      } else if (std::string_view("[]{},:<>+-").find(static_cast<char>(c)) != std::string_view::npos) {
        t.type = Tok::kPunct;
        t.text = std::string(1, take());
      } else {
        t.type = Tok::kInvalid;
        t.text = std::string(1, take());
      }
      out.push_back(std::move(t));
    }
  }

 private:
  bool starts_number() const {
    std::size_t j = i_;
    if (src_[j] == '-' || src_[j] == '+') ++j;
    if (j < src_.size() && src_[j] == '.') ++j;
    return j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j]));
  }

  void skip_space() {
    while (i_ < src_.size()) {
      const char c = src_[i_];
      if (c == '#') {
        while (i_ < src_.size() && src_[i_] != '\n') take();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        take();
      } else {
        break;
      }
    }
  }

  char take() {
    const char c = src_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  std::string_view src_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

std::string describe(const Token& t) {
  switch (t.type) {
    case Tok::kEnd:
      return "end of input";
    case Tok::kString:
      return "string \"" + t.text + "\"";
    case Tok::kInvalid:
      return t.text.size() == 1 ? "'" + t.text + "'" : t.text;
    default:
      return "'" + t.text + "'";
  }
}

struct SyntaxError {
  Diagnostic diag;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  RiskModel run() {
    RiskModel m;
    if (peek().type == Tok::kEnd) fail("expected declaration", {"actor", "goal", "feature", "event", "situation"});
    while (peek().type != Tok::kEnd) declaration(m);
    return m;
  }

 private:
  const Token& peek() const { return toks_[i_]; }
  Token next() { return toks_[i_ == toks_.size() - 1 ? i_ : i_++]; }

  bool at_word(std::string_view w) const { return peek().type == Tok::kWord && peek().text == w; }
  bool at_punct(char c) const {
    return peek().type == Tok::kPunct && peek().text.size() == 1 && peek().text[0] == c;
  }

  [[noreturn]] void fail(const std::string& what, const std::vector<std::string>& expected) {
    std::string msg = what;
    if (!expected.empty()) {
      msg += " (expected ";
      for (std::size_t k = 0; k < expected.size(); ++k) {
        if (k) msg += k + 1 == expected.size() ? " or " : ", ";
        msg += expected[k];
      }
      msg += ")";
    }
    msg += ", found " + describe(peek());
    throw SyntaxError{{"syntax", "", msg, peek().pos}};
  }

  void keyword(std::string_view w) {
    if (!at_word(w)) fail("syntax error", {"'" + std::string(w) + "'"});
    next();
  }

  void punct(char c) {
    if (!at_punct(c)) fail("syntax error", {std::string("'") + c + "'"});
    next();
  }

  std::string ident(const std::string& what) {
    if (peek().type != Tok::kWord) fail("syntax error", {what});
    return next().text;
  }

  std::string quoted(const std::string& what) {
    if (peek().type != Tok::kString) fail("syntax error", {what});
    return next().text;
  }

  double number(const std::string& what) {
    if (peek().type != Tok::kNumber) fail(what + " not a number", {"number"});
    const auto v = io::parse_double(peek().text);
    if (!v) fail(what + " not a number", {"number"});
    next();
    return *v;
  }

  std::vector<std::string> ident_list(const std::string& what) {
    std::vector<std::string> out{ident(what)};
    while (at_punct(',')) {
      next();
      out.push_back(ident(what));
    }
    return out;
  }

  void declaration(RiskModel& m) {
    const SourcePos pos = peek().pos;
    if (at_word("actor")) {
      next();
      m.actors.push_back({ident("actor name"), pos});
    } else if (at_word("goal")) {
      next();
      Goal g;
      g.pos = pos;
      g.name = ident("goal name");
      keyword("owner");
      g.owner = ident("actor name");
      g.description = quoted("quoted description");
      m.goals.push_back(std::move(g));
    } else if (at_word("feature")) {
      next();
      m.features.push_back(feature(pos));
    } else if (at_word("event")) {
      next();
      m.events.push_back(event(pos));
    } else if (at_word("situation")) {
      next();
      situation(m, pos);
    } else {
      fail("expected declaration", {"actor", "goal", "feature", "event", "situation"});
    }
  }

  DomainFeature feature(SourcePos pos) {
    DomainFeature f;
    f.pos = pos;
    f.name = ident("feature name");
    if (at_word("continuous") || at_word("integer")) {
      f.kind = next().text == "continuous" ? FeatureKind::kContinuous : FeatureKind::kInteger;
      punct('[');
      f.lo = number("lower bound");
      punct(',');
      f.hi = number("upper bound");
      punct(']');
      if (peek().type != Tok::kWord && peek().type != Tok::kNumber) fail("syntax error", {"units"});
      f.units = next().text;
    } else if (at_word("categorical")) {
      next();
      f.kind = FeatureKind::kCategorical;
      punct('{');
      if (!at_punct('}')) {
        while (true) {
          if (peek().type != Tok::kWord && peek().type != Tok::kNumber) fail("syntax error", {"category value"});
          f.categories.push_back(next().text);
          if (!at_punct(',')) break;
          next();
        }
      }
      punct('}');
    } else {
      fail("syntax error", {"'continuous'", "'integer'", "'categorical'"});
    }
    keyword("binds");
    f.binding = ident("scenario parameter path");
    return f;
  }

  Event event(SourcePos pos) {
    Event e;
    e.pos = pos;
    e.name = ident("event name");
    if (at_word("positive")) {
      e.polarity = Polarity::kPositive;
    } else if (at_word("negative")) {
      e.polarity = Polarity::kNegative;
    } else {
      fail("syntax error", {"'positive'", "'negative'"});
    }
    next();
    keyword("when");
    e.condition.metric = ident("metric name");
    if (at_punct('<')) {
      e.condition.op = CompareOp::kLess;
    } else if (at_punct('>')) {
      e.condition.op = CompareOp::kGreater;
    } else {
      fail("syntax error", {"'<'", "'>'"});
    }
    next();
    e.condition.threshold = number("threshold");
    keyword("impacts");
    while (true) {
      Impact imp;
      if (at_punct('+')) {
        imp.sign = ImpactSign::kPlus;
      } else if (at_punct('-')) {
        imp.sign = ImpactSign::kMinus;
      } else {
        fail("syntax error", {"'+'", "'-'"});
      }
      next();
      imp.goal = ident("goal name");
      e.impacts.push_back(std::move(imp));
      if (!at_punct(',')) break;
      next();
    }
    if (at_word("likelihood")) {
      next();
      Likelihood l;
      l.fraction = number("likelihood");
      keyword("of");
      if (peek().type != Tok::kNumber || !io::parse_int(peek().text)) fail("sample count not an integer", {"integer"});
      l.samples = *io::parse_int(next().text);
      e.likelihood = l;
    }
    return e;
  }

  void situation(RiskModel& m, SourcePos pos) {
    Situation s;
    s.pos = pos;
    s.name = ident("situation name");
    s.description = quoted("quoted description");
    keyword("scenario");
    s.scenario_ref = quoted("quoted scenario file");
    keyword("exposes");
    s.exposes = ident_list("event name");
    keyword("features");
    s.features = ident_list("feature name");
    if (at_word("indicators")) {
      next();
      while (true) {
        Indicator ind;
        ind.pos = peek().pos;
        ind.name = ident("indicator name");
        punct(':');
        ind.metric = ident("metric name");
        ind.situation = s.name;
        s.indicators.push_back(ind.name);
        m.indicators.push_back(std::move(ind));
        if (!at_punct(',')) break;
        next();
      }
    }
    m.situations.push_back(std::move(s));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

}  // namespace

RiskModel parse_risk_model(std::string_view text) {
  RiskModel m;
  try {
    m = Parser(Lexer(text).run()).run();
  } catch (const SyntaxError& e) {
    throw ModelError({e.diag});
  }
  if (auto diags = validate(m); !diags.empty()) throw ModelError(std::move(diags));
  return m;
}

}  // namespace cais::model
