#include "vdpf/pomdp_format.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <sstream>
#include <vector>

#include "vdpf/errors.hpp"
#include "vdpf/text.hpp"

namespace vdpf {

namespace {

struct Token {
  std::string text;
  std::size_t line;
  std::size_t column;
  bool is_colon() const { return text == ":"; }
};

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t column = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      column = 1;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v') {
      ++i;
      ++column;
    } else if (c == ':') {
      tokens.push_back({":", line, column});
      ++i;
      ++column;
    } else {
      const std::size_t start = i;
      const std::size_t start_col = column;
      while (i < text.size()) {
        const char d = text[i];
        if (d == ':' || d == '#' || d == ' ' || d == '\t' || d == '\r' || d == '\n' || d == '\f' || d == '\v') break;
        ++i;
        ++column;
      }
      tokens.push_back({std::string(text.substr(start, i - start)), line, start_col});
    }
  }
  return tokens;
}

enum class Axis { state, action, observation };

class Parser {
 public:
  explicit Parser(std::string_view text) : tokens_(tokenize(text)) {
    if (!tokens_.empty()) end_line_ = tokens_.back().line;
  }

  Pomdp parse();

 private:
  bool at_end() const { return pos_ >= tokens_.size(); }
  const Token& peek(std::size_t ahead = 0) const { return tokens_[pos_ + ahead]; }
  bool has(std::size_t ahead) const { return pos_ + ahead < tokens_.size(); }

  [[noreturn]] void fail(const std::string& what) const {
    if (at_end()) throw ParseError(what + " (unexpected end of input)", end_line_, 1);
    throw ParseError(what, peek().line, peek().column);
  }
  [[noreturn]] static void fail_at(const Token& t, const std::string& what) {
    throw ParseError(what, t.line, t.column);
  }

  const Token& take() {
    if (at_end()) fail("expected more input");
    return tokens_[pos_++];
  }
  void expect_colon() {
    if (at_end() || !peek().is_colon()) fail("expected ':'");
    ++pos_;
  }
  bool next_is_colon() const { return !at_end() && peek().is_colon(); }
  // A keyword is any token directly followed by a colon.
  bool at_keyword() const { return has(1) && peek(1).is_colon() && !peek().is_colon(); }

  double take_number() {
    const Token& t = take();
    auto v = parse_double(t.text);
    if (!v) fail_at(t, "expected a number, found '" + t.text + "'");
    return *v;
  }

  void parse_header(const Token& keyword);
  void parse_axis(Axis axis, const Token& keyword);
  void parse_start(const Token& keyword);
  void parse_transition();
  void parse_observation();
  void parse_reward();
  void require_dimensions(const Token& keyword) const;

  std::size_t count(Axis axis) const {
    switch (axis) {
      case Axis::state: return num_states_;
      case Axis::action: return num_actions_;
      case Axis::observation: return num_observations_;
    }
    return 0;
  }
  const std::vector<std::string>& names(Axis axis) const {
    switch (axis) {
      case Axis::state: return labels_.states;
      case Axis::action: return labels_.actions;
      case Axis::observation: return labels_.observations;
    }
    return labels_.states;
  }
  std::vector<std::size_t> take_index(Axis axis);
  std::optional<std::size_t> lookup(Axis axis, const std::string& name) const;

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t end_line_ = 1;

  std::optional<double> discount_;
  bool cost_ = false;
  std::size_t num_states_ = 0;
  std::size_t num_actions_ = 0;
  std::size_t num_observations_ = 0;
  Labels labels_;
  std::optional<std::vector<double>> start_;
  bool body_started_ = false;

  std::vector<double> transition_;
  std::vector<double> observation_;
  std::vector<double> reward4_;  // [a][s][s'][z]
};

std::optional<std::size_t> Parser::lookup(Axis axis, const std::string& name) const {
  const auto& list = names(axis);
  for (std::size_t i = 0; i < list.size(); ++i)
    if (list[i] == name) return i;
  if (auto n = parse_unsigned(name); n && *n < count(axis)) return static_cast<std::size_t>(*n);
  return std::nullopt;
}

std::vector<std::size_t> Parser::take_index(Axis axis) {
  const Token& t = take();
  if (t.is_colon()) fail_at(t, "expected an index, found ':'");
  std::vector<std::size_t> out;
  if (t.text == "*") {
    out.resize(count(axis));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = i;
    return out;
  }
  auto idx = lookup(axis, t.text);
  if (!idx) {
    static constexpr std::array<const char*, 3> kind{"state", "action", "observation"};
    fail_at(t, std::string("unknown ") + kind[static_cast<int>(axis)] + " '" + t.text + "'");
  }
  out.push_back(*idx);
  return out;
}

void Parser::parse_axis(Axis axis, const Token& keyword) {
  if (body_started_) fail_at(keyword, "'" + keyword.text + "' must precede T/O/R entries");
  if (count(axis) != 0) fail_at(keyword, "duplicate '" + keyword.text + "'");
  std::vector<std::string> list;
  while (!at_end() && !at_keyword()) list.push_back(take().text);
  if (list.empty()) fail_at(keyword, "'" + keyword.text + "' needs a count or a list of names");
  std::size_t n = 0;
  std::vector<std::string> labels;
  if (list.size() == 1) {
    if (auto v = parse_unsigned(list[0])) {
      n = static_cast<std::size_t>(*v);
      if (n == 0) fail_at(keyword, "'" + keyword.text + "' count must be positive");
    }
  }
  if (n == 0) {
    for (std::size_t i = 0; i < list.size(); ++i)
      for (std::size_t j = 0; j < i; ++j)
        if (list[i] == list[j]) fail_at(keyword, "duplicate name '" + list[i] + "'");
    n = list.size();
    labels = std::move(list);
  }
  switch (axis) {
    case Axis::state: num_states_ = n; labels_.states = std::move(labels); break;
    case Axis::action: num_actions_ = n; labels_.actions = std::move(labels); break;
    case Axis::observation: num_observations_ = n; labels_.observations = std::move(labels); break;
  }
}

void Parser::parse_start(const Token& keyword) {
  if (num_states_ == 0) fail_at(keyword, "'start' must follow 'states'");
  if (start_) fail_at(keyword, "duplicate 'start'");
  if (at_end() || at_keyword()) fail_at(keyword, "'start' needs a distribution");
  const Token& first = peek();
  if (first.text == "uniform") {
    ++pos_;
    start_ = std::vector<double>(num_states_, 1.0 / static_cast<double>(num_states_));
    return;
  }
  for (std::size_t i = 0; i < labels_.states.size(); ++i) {
    if (labels_.states[i] == first.text) {
      ++pos_;
      std::vector<double> probs(num_states_, 0.0);
      probs[i] = 1.0;
      start_ = std::move(probs);
      return;
    }
  }
  if (!parse_double(first.text)) fail_at(first, "unknown state '" + first.text + "' in 'start'");
  std::vector<double> probs(num_states_);
  for (double& p : probs) p = take_number();
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw StochasticityError("start", p);
    sum += p;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) throw StochasticityError("start", sum);
  start_ = std::move(probs);
}

void Parser::parse_header(const Token& keyword) {
  if (keyword.text == "discount") {
    if (body_started_) fail_at(keyword, "'discount' must precede T/O/R entries");
    const Token& t = take();
    auto v = parse_double(t.text);
    if (!v) fail_at(t, "expected a number, found '" + t.text + "'");
    if (!(*v >= 0.0 && *v < 1.0)) fail_at(t, "discount " + t.text + " out of range [0, 1)");
    discount_ = *v;
  } else if (keyword.text == "values") {
    const Token& t = take();
    if (t.text == "reward") cost_ = false;
    else if (t.text == "cost") cost_ = true;
    else fail_at(t, "values must be 'reward' or 'cost'");
  } else if (keyword.text == "states") {
    parse_axis(Axis::state, keyword);
  } else if (keyword.text == "actions") {
    parse_axis(Axis::action, keyword);
  } else if (keyword.text == "observations") {
    parse_axis(Axis::observation, keyword);
  } else if (keyword.text == "start") {
    parse_start(keyword);
  } else {
    fail_at(keyword, "unsupported construct '" + keyword.text + ":'");
  }
}

void Parser::require_dimensions(const Token& keyword) const {
  if (num_states_ == 0 || num_actions_ == 0 || num_observations_ == 0)
    fail_at(keyword, "'" + keyword.text + "' before states, actions and observations are declared");
}

void Parser::parse_transition() {
  const std::size_t n = num_states_;
  auto actions = take_index(Axis::action);
  auto set = [&](std::size_t a, std::size_t s, std::size_t s2, double p) {
    transition_[(a * n + s) * n + s2] = p;
  };
  if (next_is_colon()) {
    ++pos_;
    auto from = take_index(Axis::state);
    if (next_is_colon()) {
      ++pos_;
      auto to = take_index(Axis::state);
      const double p = take_number();
      for (auto a : actions)
        for (auto s : from)
          for (auto s2 : to) set(a, s, s2, p);
      return;
    }
    std::vector<double> row(n);
    if (!at_end() && peek().text == "uniform") {
      ++pos_;
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(n));
    } else {
      for (double& p : row) p = take_number();
    }
    for (auto a : actions)
      for (auto s : from)
        for (std::size_t s2 = 0; s2 < n; ++s2) set(a, s, s2, row[s2]);
    return;
  }
  std::vector<double> matrix(n * n, 0.0);
  if (!at_end() && peek().text == "identity") {
    ++pos_;
    for (std::size_t s = 0; s < n; ++s) matrix[s * n + s] = 1.0;
  } else if (!at_end() && peek().text == "uniform") {
    ++pos_;
    std::fill(matrix.begin(), matrix.end(), 1.0 / static_cast<double>(n));
  } else {
    for (double& p : matrix) p = take_number();
  }
  for (auto a : actions)
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t s2 = 0; s2 < n; ++s2) set(a, s, s2, matrix[s * n + s2]);
}

void Parser::parse_observation() {
  const std::size_t n = num_states_;
  const std::size_t m = num_observations_;
  auto actions = take_index(Axis::action);
  auto set = [&](std::size_t a, std::size_t s2, std::size_t z, double p) {
    observation_[(a * n + s2) * m + z] = p;
  };
  if (next_is_colon()) {
    ++pos_;
    auto arrivals = take_index(Axis::state);
    if (next_is_colon()) {
      ++pos_;
      auto zs = take_index(Axis::observation);
      const double p = take_number();
      for (auto a : actions)
        for (auto s2 : arrivals)
          for (auto z : zs) set(a, s2, z, p);
      return;
    }
    std::vector<double> row(m);
    if (!at_end() && peek().text == "uniform") {
      ++pos_;
      std::fill(row.begin(), row.end(), 1.0 / static_cast<double>(m));
    } else {
      for (double& p : row) p = take_number();
    }
    for (auto a : actions)
      for (auto s2 : arrivals)
        for (std::size_t z = 0; z < m; ++z) set(a, s2, z, row[z]);
    return;
  }
  std::vector<double> matrix(n * m, 0.0);
  if (!at_end() && peek().text == "uniform") {
    ++pos_;
    std::fill(matrix.begin(), matrix.end(), 1.0 / static_cast<double>(m));
  } else if (!at_end() && peek().text == "identity") {
    if (n != m) fail("'identity' observation matrix needs |S| = |Z|");
    ++pos_;
    for (std::size_t s = 0; s < n; ++s) matrix[s * m + s] = 1.0;
  } else {
    for (double& p : matrix) p = take_number();
  }
  for (auto a : actions)
    for (std::size_t s2 = 0; s2 < n; ++s2)
      for (std::size_t z = 0; z < m; ++z) set(a, s2, z, matrix[s2 * m + z]);
}

void Parser::parse_reward() {
  const std::size_t n = num_states_;
  const std::size_t m = num_observations_;
  auto actions = take_index(Axis::action);
  expect_colon();
  auto from = take_index(Axis::state);
  if (!next_is_colon()) fail("unsupported reward form: expected 'R: a : s : s' : z value'");
  ++pos_;
  auto to = take_index(Axis::state);
  if (!next_is_colon()) fail("unsupported reward form: expected 'R: a : s : s' : z value'");
  ++pos_;
  auto zs = take_index(Axis::observation);
  const double r = take_number();
  for (auto a : actions)
    for (auto s : from)
      for (auto s2 : to)
        for (auto z : zs) reward4_[((a * n + s) * n + s2) * m + z] = r;
}

Pomdp Parser::parse() {
  while (!at_end()) {
    const Token keyword = take();
    if (keyword.is_colon()) fail_at(keyword, "unexpected ':'");
    expect_colon();
    if (keyword.text == "T" || keyword.text == "O" || keyword.text == "R") {
      require_dimensions(keyword);
      if (!body_started_) {
        body_started_ = true;
        const std::size_t n = num_states_;
        transition_.assign(num_actions_ * n * n, 0.0);
        observation_.assign(num_actions_ * n * num_observations_, 0.0);
        reward4_.assign(num_actions_ * n * n * num_observations_, 0.0);
      }
      if (keyword.text == "T") parse_transition();
      else if (keyword.text == "O") parse_observation();
      else parse_reward();
    } else {
      parse_header(keyword);
    }
  }
  if (!discount_) throw ParseError("missing 'discount'", end_line_, 1);
  if (num_states_ == 0 || num_actions_ == 0 || num_observations_ == 0)
    throw ParseError("missing states, actions or observations", end_line_, 1);
  if (!body_started_) throw ParseError("no T/O/R entries", end_line_, 1);

  const std::size_t n = num_states_;
  const std::size_t na = num_actions_;
  const std::size_t m = num_observations_;
  std::vector<double> reward(n * na, 0.0);
  for (std::size_t a = 0; a < na; ++a) {
    for (std::size_t s = 0; s < n; ++s) {
      const double* block = &reward4_[(a * n + s) * n * m];
      bool constant = true;
      for (std::size_t k = 1; k < n * m && constant; ++k) constant = block[k] == block[0];
      if (constant) {
        reward[s * na + a] = cost_ ? -block[0] : block[0];
        continue;
      }
      double r = 0.0;
      for (std::size_t s2 = 0; s2 < n; ++s2) {
        const double t = transition_[(a * n + s) * n + s2];
        if (t == 0.0) continue;
        const double* obs = &observation_[(a * n + s2) * m];
        const double* rr = &reward4_[((a * n + s) * n + s2) * m];
        double inner = 0.0;
        for (std::size_t z = 0; z < m; ++z) inner += obs[z] * rr[z];
        r += t * inner;
      }
      reward[s * na + a] = cost_ ? -r : r;
    }
  }
  std::optional<Belief> start;
  if (start_) start = Belief(*start_);
  return Pomdp(n, na, m, std::move(transition_), std::move(observation_), std::move(reward), *discount_,
               std::move(labels_), std::move(start));
}

void write_axis(std::ostringstream& out, const char* keyword, std::size_t n, const std::vector<std::string>& names) {
  out << keyword << ":";
  if (names.empty()) {
    out << ' ' << n;
  } else {
    for (const auto& name : names) out << ' ' << name;
  }
  out << '\n';
}

}  // namespace

Pomdp parse_pomdp(std::string_view text) { return Parser(text).parse(); }

Pomdp load_pomdp(const std::filesystem::path& path) { return parse_pomdp(read_file(path)); }

std::string write_pomdp(const Pomdp& model) {
  const std::size_t n = model.num_states();
  std::ostringstream out;
  out << "discount: " << format_double(model.discount()) << '\n';
  out << "values: reward\n";
  write_axis(out, "states", n, model.labels().states);
  write_axis(out, "actions", model.num_actions(), model.labels().actions);
  write_axis(out, "observations", model.num_observations(), model.labels().observations);
  if (model.start()) {
    out << "start:";
    for (double p : model.start()->probs()) out << ' ' << format_double(p);
    out << '\n';
  }
  out << '\n';
  for (std::size_t a = 0; a < model.num_actions(); ++a) {
    out << "T: " << model.action_name(a) << '\n';
    for (std::size_t s = 0; s < n; ++s) {
      const auto row = model.transition_row(a, s);
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << format_double(row[j]);
      out << '\n';
    }
  }
  out << '\n';
  for (std::size_t a = 0; a < model.num_actions(); ++a) {
    out << "O: " << model.action_name(a) << '\n';
    for (std::size_t s = 0; s < n; ++s) {
      const auto row = model.observation_row(a, s);
      for (std::size_t j = 0; j < row.size(); ++j) out << (j ? " " : "") << format_double(row[j]);
      out << '\n';
    }
  }
  out << '\n';
  for (std::size_t a = 0; a < model.num_actions(); ++a)
    for (std::size_t s = 0; s < n; ++s)
      out << "R: " << model.action_name(a) << " : " << model.state_name(s) << " : * : * "
          << format_double(model.reward(s, a)) << '\n';
  return out.str();
}

}  // namespace vdpf
