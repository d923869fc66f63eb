#include <cctype>
#include <chrono>
#include <limits>
#include <map>
#include <memory>
#include <thread>
#include <variant>

#include "tir/executor.hpp"

namespace tir {

namespace {

using Clock = std::chrono::steady_clock;
using Value = std::variant<std::int64_t, std::string>;

constexpr std::size_t kMaxStringBytes = std::size_t{64} << 20;

/// A Python exception raised by the interpreted program.
struct PyError {
  std::string type;
  std::string message;
};

/// Source the stub cannot interpret.
struct Unsupported {
  std::string what;
};

enum class Tok { name, integer, string, op };

struct Token {
  Tok kind;
  std::string text;
  std::int64_t integer = 0;
};

char decode_escape(char c, bool& known) {
  known = true;
  switch (c) {
    case 'n': return '\n';
    case 't': return '\t';
    case 'r': return '\r';
    case 'b': return '\b';
    case 'f': return '\f';
    case 'v': return '\v';
    case 'a': return '\a';
    case '0': return '\0';
    case '\\': return '\\';
    case '\'': return '\'';
    case '"': return '"';
    default: known = false; return c;
  }
}

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') break;

    bool raw = false;
    if ((c == 'r' || c == 'R') && i + 1 < line.size() && (line[i + 1] == '"' || line[i + 1] == '\'')) {
      raw = true;
      ++i;
    }
    const char q = line[i];
    if (q == '"' || q == '\'') {
      if (line.substr(i, 3) == std::string(3, q)) throw Unsupported{"triple-quoted strings"};
      std::string value;
      std::size_t j = i + 1;
      bool closed = false;
      while (j < line.size()) {
        const char d = line[j];
        if (d == q) {
          closed = true;
          break;
        }
        if (d == '\\' && j + 1 < line.size()) {
          if (raw) {
            value += d;
            value += line[j + 1];
          } else {
            bool known = false;
            const char e = decode_escape(line[j + 1], known);
            if (!known) value += '\\';
            value += e;
          }
          j += 2;
          continue;
        }
        value += d;
        ++j;
      }
      if (!closed) throw Unsupported{"unterminated string literal"};
      out.push_back({Tok::string, std::move(value)});
      i = j + 1;
      continue;
    }
    if (raw) --i;

    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_')) ++j;
      out.push_back({Tok::name, std::string(line.substr(i, j - i))});
      i = j;
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      std::int64_t v = 0;
      while (j < line.size() && std::isdigit(static_cast<unsigned char>(line[j]))) {
        const int d = line[j] - '0';
        if (v > (std::numeric_limits<std::int64_t>::max() - d) / 10) throw Unsupported{"integer literal too large"};
        v = v * 10 + d;
        ++j;
      }
      if (j < line.size() && (std::isalpha(static_cast<unsigned char>(line[j])) || line[j] == '.')) {
        throw Unsupported{"numeric literal form"};
      }
      out.push_back({Tok::integer, std::string(line.substr(i, j - i)), v});
      i = j;
      continue;
    }
    if (std::string_view("(),=+-*:.").find(c) != std::string_view::npos) {
      if (i + 1 < line.size() && (line[i + 1] == '=' || (c == '*' && line[i + 1] == '*'))) {
        throw Unsupported{std::string("operator '") + c + line[i + 1] + "'"};
      }
      out.push_back({Tok::op, std::string(1, c)});
      ++i;
      continue;
    }
    throw Unsupported{std::string("character '") + c + "'"};
  }
  return out;
}

struct Expr {
  enum class Kind { literal, name, negate, binary };
  Kind kind = Kind::literal;
  Value literal;
  std::string name;
  char op = 0;
  std::unique_ptr<Expr> lhs;
  std::unique_ptr<Expr> rhs;
};

class ExprParser {
 public:
  ExprParser(const std::vector<Token>& toks, std::size_t pos) : toks_(toks), pos_(pos) {}

  std::unique_ptr<Expr> sum() {
    auto lhs = product();
    while (peek_op("+") || peek_op("-")) {
      const char op = toks_[pos_++].text[0];
      auto rhs = product();
      lhs = binary(op, std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  std::size_t pos() const { return pos_; }

 private:
  bool peek_op(std::string_view op) const {
    return pos_ < toks_.size() && toks_[pos_].kind == Tok::op && toks_[pos_].text == op;
  }

  static std::unique_ptr<Expr> binary(char op, std::unique_ptr<Expr> lhs, std::unique_ptr<Expr> rhs) {
    auto e = std::make_unique<Expr>();
    e->kind = Expr::Kind::binary;
    e->op = op;
    e->lhs = std::move(lhs);
    e->rhs = std::move(rhs);
    return e;
  }

  std::unique_ptr<Expr> product() {
    auto lhs = unary();
    while (peek_op("*")) {
      ++pos_;
      auto rhs = unary();
      lhs = binary('*', std::move(lhs), std::move(rhs));
    }
    return lhs;
  }

  std::unique_ptr<Expr> unary() {
    if (peek_op("-")) {
      ++pos_;
      auto e = std::make_unique<Expr>();
      e->kind = Expr::Kind::negate;
      e->lhs = unary();
      return e;
    }
    return atom();
  }

  std::unique_ptr<Expr> atom() {
    if (pos_ >= toks_.size()) throw Unsupported{"expression expected"};
    const Token& t = toks_[pos_];
    auto e = std::make_unique<Expr>();
    switch (t.kind) {
      case Tok::integer:
        e->literal = t.integer;
        ++pos_;
        return e;
      case Tok::string:
        e->literal = t.text;
        ++pos_;
        // Adjacent literals concatenate.
        while (pos_ < toks_.size() && toks_[pos_].kind == Tok::string) {
          std::get<std::string>(e->literal) += toks_[pos_++].text;
        }
        return e;
      case Tok::name:
        if (pos_ + 1 < toks_.size() && toks_[pos_ + 1].kind == Tok::op &&
            (toks_[pos_ + 1].text == "(" || toks_[pos_ + 1].text == ".")) {
          throw Unsupported{"call or attribute access on '" + t.text + "'"};
        }
        e->kind = Expr::Kind::name;
        e->name = t.text;
        ++pos_;
        return e;
      case Tok::op:
        if (t.text == "(") {
          ++pos_;
          auto inner = sum();
          if (!peek_op(")")) throw Unsupported{"')' expected"};
          ++pos_;
          return inner;
        }
        throw Unsupported{"unexpected '" + t.text + "'"};
    }
    throw Unsupported{"expression expected"};
  }

  const std::vector<Token>& toks_;
  std::size_t pos_;
};

struct Stmt {
  enum class Kind { nop, assign, print, raise, loop_forever };
  Kind kind = Kind::nop;
  int line = 0;
  std::string target;  // assign target / exception type
  std::vector<std::unique_ptr<Expr>> args;
};

bool is_op(const std::vector<Token>& t, std::size_t i, std::string_view op) {
  return i < t.size() && t[i].kind == Tok::op && t[i].text == op;
}

bool is_name(const std::vector<Token>& t, std::size_t i, std::string_view name) {
  return i < t.size() && t[i].kind == Tok::name && t[i].text == name;
}

std::vector<Stmt> parse_program(std::string_view code, int& failing_line) {
  std::vector<Stmt> program;
  bool awaiting_loop_body = false;
  bool in_loop_body = false;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= code.size()) {
    const std::size_t end = code.find('\n', pos);
    const std::string_view line = code.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
    pos = end == std::string_view::npos ? code.size() + 1 : end + 1;
    ++line_no;
    failing_line = line_no;

    const auto toks = tokenize(line);
    if (toks.empty()) continue;
    const bool indented = !line.empty() && (line.front() == ' ' || line.front() == '\t');

    if (indented) {
      if (!(awaiting_loop_body || in_loop_body)) throw Unsupported{"unexpected indentation"};
      if (!(toks.size() == 1 && is_name(toks, 0, "pass"))) throw Unsupported{"loop bodies other than 'pass'"};
      awaiting_loop_body = false;
      in_loop_body = true;
      continue;
    }
    if (awaiting_loop_body) throw Unsupported{"expected an indented block"};
    in_loop_body = false;

    Stmt s;
    s.line = line_no;
    const Token& head = toks.front();
    if (head.kind == Tok::name && (head.text == "import" || head.text == "from")) {
      s.kind = Stmt::Kind::nop;
    } else if (toks.size() == 1 && is_name(toks, 0, "pass")) {
      s.kind = Stmt::Kind::nop;
    } else if (is_name(toks, 0, "while")) {
      if (!(is_name(toks, 1, "True") && is_op(toks, 2, ":"))) throw Unsupported{"only 'while True:' loops"};
      if (toks.size() == 3) {
        awaiting_loop_body = true;
      } else if (!(toks.size() == 4 && is_name(toks, 3, "pass"))) {
        throw Unsupported{"loop bodies other than 'pass'"};
      }
      s.kind = Stmt::Kind::loop_forever;
    } else if (is_name(toks, 0, "print") && is_op(toks, 1, "(")) {
      s.kind = Stmt::Kind::print;
      std::size_t i = 2;
      if (!is_op(toks, i, ")")) {
        for (;;) {
          if (i + 1 < toks.size() && toks[i].kind == Tok::name && is_op(toks, i + 1, "=")) {
            throw Unsupported{"keyword arguments to print"};
          }
          ExprParser p(toks, i);
          s.args.push_back(p.sum());
          i = p.pos();
          if (is_op(toks, i, ",")) {
            ++i;
            continue;
          }
          break;
        }
      }
      if (!is_op(toks, i, ")") || i + 1 != toks.size()) throw Unsupported{"malformed print call"};
    } else if (is_name(toks, 0, "raise")) {
      s.kind = Stmt::Kind::raise;
      if (toks.size() < 2 || toks[1].kind != Tok::name) throw Unsupported{"raise needs an exception name"};
      s.target = toks[1].text;
      std::size_t i = 2;
      if (is_op(toks, i, "(")) {
        ++i;
        if (!is_op(toks, i, ")")) {
          ExprParser p(toks, i);
          s.args.push_back(p.sum());
          i = p.pos();
        }
        if (!is_op(toks, i, ")")) throw Unsupported{"malformed raise"};
        ++i;
      }
      if (i != toks.size()) throw Unsupported{"malformed raise"};
    } else if (head.kind == Tok::name && is_op(toks, 1, "=")) {
      s.kind = Stmt::Kind::assign;
      s.target = head.text;
      ExprParser p(toks, 2);
      s.args.push_back(p.sum());
      if (p.pos() != toks.size()) throw Unsupported{"trailing tokens after expression"};
    } else {
      throw Unsupported{"statement form"};
    }
    program.push_back(std::move(s));
  }
  if (awaiting_loop_body) throw Unsupported{"expected an indented block"};
  return program;
}

std::string_view type_name(const Value& v) { return std::holds_alternative<std::int64_t>(v) ? "int" : "str"; }

std::string repeat(const std::string& s, std::int64_t n) {
  if (n <= 0 || s.empty()) return {};
  if (static_cast<std::uint64_t>(n) > kMaxStringBytes / s.size()) throw Unsupported{"string too large"};
  std::string out;
  out.reserve(s.size() * static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out += s;
  return out;
}

class Interpreter {
 public:
  Value eval(const Expr& e) {
    switch (e.kind) {
      case Expr::Kind::literal: return e.literal;
      case Expr::Kind::name: {
        const auto it = globals_.find(e.name);
        if (it == globals_.end()) throw PyError{"NameError", "name '" + e.name + "' is not defined"};
        return it->second;
      }
      case Expr::Kind::negate: {
        const Value v = eval(*e.lhs);
        if (const auto* i = std::get_if<std::int64_t>(&v)) {
          if (*i == std::numeric_limits<std::int64_t>::min()) throw Unsupported{"integer overflow"};
          return -*i;
        }
        throw PyError{"TypeError", "bad operand type for unary -: 'str'"};
      }
      case Expr::Kind::binary: return binary(e.op, eval(*e.lhs), eval(*e.rhs));
    }
    return Value{};
  }

  void assign(const std::string& name, Value v) { globals_[name] = std::move(v); }

 private:
  static Value binary(char op, const Value& a, const Value& b) {
    const auto* ai = std::get_if<std::int64_t>(&a);
    const auto* bi = std::get_if<std::int64_t>(&b);
    const auto* as = std::get_if<std::string>(&a);
    const auto* bs = std::get_if<std::string>(&b);
    std::int64_t r = 0;
    if (ai && bi) {
      const bool overflow = op == '+'   ? __builtin_add_overflow(*ai, *bi, &r)
                            : op == '-' ? __builtin_sub_overflow(*ai, *bi, &r)
                                        : __builtin_mul_overflow(*ai, *bi, &r);
      if (overflow) throw Unsupported{"integer overflow"};
      return r;
    }
    if (op == '+' && as && bs) return *as + *bs;
    if (op == '*' && as && bi) return repeat(*as, *bi);
    if (op == '*' && ai && bs) return repeat(*bs, *ai);
    if (op == '+' && as) {
      throw PyError{"TypeError", "can only concatenate str (not \"" + std::string(type_name(b)) + "\") to str"};
    }
    throw PyError{"TypeError", std::string("unsupported operand type(s) for ") + op + ": '" +
                                   std::string(type_name(a)) + "' and '" + std::string(type_name(b)) + "'"};
  }

  std::map<std::string, Value> globals_;
};

std::string to_text(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  return std::get<std::string>(v);
}

}  // namespace

ExecutionResult StubExecutor::execute(std::string_view code, const ExecLimits& limits) {
  const auto start = Clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start).count();
  };
  ExecutionResult result;

  int line = 0;
  std::vector<Stmt> program;
  try {
    program = parse_program(code, line);
  } catch (const Unsupported& u) {
    result.status = ExecStatus::runner_failure;
    result.std_err = "stub executor: line " + std::to_string(line) + ": unsupported " + u.what + "\n";
    result.duration_ms = real_time_ ? elapsed_ms() : 0;
    return result;
  }

  Interpreter interp;
  std::string out;
  result.status = ExecStatus::ok;
  for (const auto& s : program) {
    try {
      switch (s.kind) {
        case Stmt::Kind::nop: break;
        case Stmt::Kind::assign: interp.assign(s.target, interp.eval(*s.args.front())); break;
        case Stmt::Kind::print: {
          for (std::size_t i = 0; i < s.args.size(); ++i) {
            if (i) out += ' ';
            out += to_text(interp.eval(*s.args[i]));
          }
          out += '\n';
          break;
        }
        case Stmt::Kind::raise:
          throw PyError{s.target, s.args.empty() ? std::string() : to_text(interp.eval(*s.args.front()))};
        case Stmt::Kind::loop_forever:
          result.status = ExecStatus::timeout;
          break;
      }
    } catch (const PyError& e) {
      result.status = ExecStatus::nonzero_exit;
      result.std_err = "Traceback (most recent call last):\n  File \"<string>\", line " + std::to_string(s.line) +
                       ", in <module>\n" + e.type + (e.message.empty() ? "" : ": " + e.message) + "\n";
    } catch (const Unsupported& u) {
      result.status = ExecStatus::runner_failure;
      result.std_err = "stub executor: line " + std::to_string(s.line) + ": unsupported " + u.what + "\n";
    }
    if (result.status != ExecStatus::ok) break;
  }

  if (result.status == ExecStatus::timeout) {
    if (real_time_) {
      std::this_thread::sleep_until(start + std::chrono::milliseconds(limits.timeout_ms));
      result.duration_ms = std::max<std::int64_t>(elapsed_ms(), limits.timeout_ms);
    } else {
      result.duration_ms = limits.timeout_ms;
    }
  } else {
    result.duration_ms = real_time_ ? elapsed_ms() : 0;
  }
  result.std_out = truncate_output(std::move(out), limits.max_output_bytes);
  result.std_err = truncate_output(std::move(result.std_err), limits.max_output_bytes);
  return result;
}

ExecReply run_job_with_stub(const ExecJob& job, bool real_time) {
  StubExecutor stub(real_time);
  return {job.id, stub.execute(job.code, {job.timeout_ms, job.max_output_bytes})};
}

}  // namespace tir
