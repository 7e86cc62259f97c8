#include "rotlab/sequences.hpp"

#include "rotlab/params.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace rotlab {

namespace {

int checked_alphabet(const Word& w, const char* what) {
    int alpha = 0;
    for (Digit d : w) {
        if (d < 1) throw std::invalid_argument(std::string(what) + ": digits must be >= 1");
        alpha = std::max(alpha, d);
    }
    return alpha;
}

// Window materialization: analyzers read digits once into a buffer.
std::vector<Digit> window_digits(const DigitStream& s, std::uint64_t window) {
    std::vector<Digit> buf;
    buf.reserve(window);
    for (std::uint64_t n = 1; n <= window; ++n) buf.push_back(s.digit_at(n));
    return buf;
}

std::string block_key(const std::vector<Digit>& buf, std::size_t start, std::size_t n) {
    std::string key;
    key.reserve(2 * n);
    for (std::size_t i = start; i < start + n; ++i) {
        key.push_back(static_cast<char>(buf[i] & 0xff));
        key.push_back(static_cast<char>((buf[i] >> 8) & 0xff));
    }
    return key;
}

}  // namespace

ExplicitStream::ExplicitStream(Word digits)
    : digits_(std::move(digits)), alphabet_(checked_alphabet(digits_, "explicit stream")) {
    if (digits_.empty()) throw std::invalid_argument("explicit stream must not be empty");
}

Digit ExplicitStream::digit_at(std::uint64_t n) const {
    if (n < 1 || n > digits_.size())
        throw std::out_of_range("explicit stream exhausted at position " + std::to_string(n) +
                                " (length " + std::to_string(digits_.size()) + ")");
    return digits_[static_cast<std::size_t>(n - 1)];
}

PeriodicStream::PeriodicStream(Word period)
    : period_(std::move(period)), alphabet_(checked_alphabet(period_, "periodic stream")) {
    if (period_.empty()) throw std::invalid_argument("periodic stream needs a nonempty period");
}

Digit PeriodicStream::digit_at(std::uint64_t n) const {
    if (n < 1) throw std::out_of_range("stream positions start at 1");
    return period_[static_cast<std::size_t>((n - 1) % period_.size())];
}

Digit thue_morse_digit(std::uint64_t n) {
    if (n < 1) throw std::out_of_range("stream positions start at 1");
    return (std::popcount(n - 1) & 1) == 0 ? 1 : 2;
}

Digit sturmian_digit(const FixedPoint& theta, const FixedPoint& rho, std::uint64_t n) {
    if (n < 1) throw std::out_of_range("stream positions start at 1");
    const int f = theta.frac_bits();
    if (rho.frac_bits() != f) throw std::invalid_argument("theta and rho need equal frac_bits");
    const BigInt one = BigInt(1) << f;
    BigInt lo = floor_div(BigInt(n) * theta.mantissa() + rho.mantissa(), one);
    BigInt hi = floor_div(BigInt(n + 1) * theta.mantissa() + rho.mantissa(), one);
    return hi - lo == 1 ? 2 : 1;
}

SturmianStream::SturmianStream(FixedPoint theta, FixedPoint rho)
    : theta_(std::move(theta)), rho_(std::move(rho)) {
    if (theta_.sign() <= 0 || FixedPoint::from_integer(1, theta_.frac_bits()) <= theta_)
        throw std::invalid_argument("sturmian theta must lie strictly inside (0, 1)");
}

RecurrentBuilder::RecurrentBuilder(std::vector<Word> words, bool cycle, bool randomized,
                                   std::uint64_t seed)
    : source_(std::move(words)), cycle_(cycle), randomized_(randomized), rng_(seed) {
    if (source_.empty()) throw std::invalid_argument("builder needs at least one building word");
    alphabet_ = 0;
    for (const Word& w : source_) {
        if (w.empty()) throw std::invalid_argument("building words must be nonempty");
        alphabet_ = std::max(alphabet_, checked_alphabet(w, "building word"));
    }
}

std::shared_ptr<RecurrentBuilder> RecurrentBuilder::from_words(std::vector<Word> words,
                                                               bool cycle) {
    return std::shared_ptr<RecurrentBuilder>(
        new RecurrentBuilder(std::move(words), cycle, false, 0));
}

std::shared_ptr<RecurrentBuilder> RecurrentBuilder::random(std::vector<Word> word_set,
                                                           std::uint64_t seed) {
    return std::shared_ptr<RecurrentBuilder>(
        new RecurrentBuilder(std::move(word_set), false, true, seed));
}

void RecurrentBuilder::ensure_stage(std::size_t i) const {
    while (words_.size() <= i) {
        std::size_t next = words_.size();
        Word w;
        if (randomized_) {
            w = source_[static_cast<std::size_t>(rng_() % source_.size())];
        } else if (cycle_) {
            w = source_[next % source_.size()];
        } else if (next < source_.size()) {
            w = source_[next];
        } else {
            throw std::out_of_range("builder exhausted its " + std::to_string(source_.size()) +
                                    " building words");
        }
        BigInt len(w.size());
        if (next > 0) len += 2 * lengths_.back();
        words_.push_back(std::move(w));
        lengths_.push_back(std::move(len));
    }
}

void RecurrentBuilder::ensure_length(std::uint64_t n) const {
    while (lengths_.empty() || lengths_.back() < n) ensure_stage(words_.size());
}

Digit RecurrentBuilder::digit_at(std::uint64_t n) const {
    if (n < 1) throw std::out_of_range("stream positions start at 1");
    std::lock_guard<std::mutex> lock(mu_);
    try {
        ensure_length(n);
    } catch (const std::out_of_range&) {
        throw std::out_of_range("builder word exhausted at position " + std::to_string(n) +
                                " (total length " +
                                (lengths_.empty() ? std::string("0") : lengths_.back().str()) +
                                ")");
    }
    std::size_t i = 0;
    while (lengths_[i] < n) ++i;
    // descend through w_i = w_{i-1} a_i w_{i-1}
    BigInt pos = n;
    while (i > 0) {
        const BigInt& left = lengths_[i - 1];
        const std::size_t li = words_[i].size();
        if (pos <= left) {
            --i;
        } else if (pos <= left + li) {
            return words_[i][static_cast<std::size_t>((pos - left - 1).convert_to<std::uint64_t>())];
        } else {
            pos -= left + li;
            --i;
        }
    }
    return words_[0][static_cast<std::size_t>((pos - 1).convert_to<std::uint64_t>())];
}

Word RecurrentBuilder::building_word(std::size_t i) const {
    std::lock_guard<std::mutex> lock(mu_);
    ensure_stage(i);
    return words_[i];
}

std::size_t RecurrentBuilder::word_length(std::size_t i) const {
    std::lock_guard<std::mutex> lock(mu_);
    ensure_stage(i);
    return words_[i].size();
}

BigInt RecurrentBuilder::omega_length(std::size_t i) const {
    std::lock_guard<std::mutex> lock(mu_);
    ensure_stage(i);
    return lengths_[i];
}

BigInt RecurrentBuilder::prefix_length(std::size_t i) const {
    if (i < 1) throw std::invalid_argument("prefix lengths L_i start at i = 1");
    std::lock_guard<std::mutex> lock(mu_);
    ensure_stage(i);
    return lengths_[i - 1] + BigInt(words_[i].size());
}

RecurrentStream::RecurrentStream(std::shared_ptr<RecurrentBuilder> builder)
    : builder_(std::move(builder)) {
    if (!builder_) throw std::invalid_argument("recurrent stream needs a builder");
}

std::uint64_t complexity(const DigitStream& s, std::size_t n, std::uint64_t window) {
    if (n < 1 || window < n) throw std::invalid_argument("complexity needs window >= n >= 1");
    std::vector<Digit> buf = window_digits(s, window);
    std::unordered_set<std::string> blocks;
    for (std::size_t start = 0; start + n <= buf.size(); ++start)
        blocks.insert(block_key(buf, start, n));
    return blocks.size();
}

std::uint64_t balance_defect(const DigitStream& s, Digit digit, std::size_t n,
                             std::uint64_t window) {
    if (n < 1 || window < n) throw std::invalid_argument("balance_defect needs window >= n >= 1");
    std::vector<Digit> buf = window_digits(s, window);
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < n; ++i) count += buf[i] == digit;
    std::uint64_t lo = count, hi = count;
    for (std::size_t start = 1; start + n <= buf.size(); ++start) {
        count += (buf[start + n - 1] == digit);
        count -= (buf[start - 1] == digit);
        lo = std::min(lo, count);
        hi = std::max(hi, count);
    }
    return hi - lo;
}

std::optional<std::uint64_t> recurrence_gap(const DigitStream& s, std::size_t n,
                                            std::uint64_t window) {
    if (n < 1 || window < 2 * n) throw std::invalid_argument("recurrence_gap needs window >= 2n");
    std::vector<Digit> buf = window_digits(s, window);
    std::optional<std::uint64_t> last, best;
    for (std::size_t start = 0; start + n <= buf.size(); ++start) {
        bool match = true;
        for (std::size_t i = 0; i < n && match; ++i) match = buf[start + i] == buf[i];
        if (!match) continue;
        if (last) {
            std::uint64_t gap = start - *last;
            best = best ? std::max(*best, gap) : gap;
        }
        last = start;
    }
    return best;
}

std::vector<Word> load_building_words(std::istream& in) {
    std::vector<Word> words;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream fields(line);
        Word w;
        long long d;
        while (fields >> d) {
            if (d < 1)
                throw std::invalid_argument("building word line " + std::to_string(lineno) +
                                            ": digits must be >= 1");
            w.push_back(static_cast<Digit>(d));
        }
        if (!fields.eof())
            throw std::invalid_argument("building word line " + std::to_string(lineno) +
                                        ": digits must be integers");
        if (!w.empty()) words.push_back(std::move(w));
    }
    return words;
}

std::vector<Word> load_building_words_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open building-word file: " + path);
    return load_building_words(in);
}

namespace {

Word parse_digit_list(const std::string& text) {
    Word w;
    if (text.find_first_of(", \t") != std::string::npos) {
        std::string normalized = text;
        for (char& c : normalized)
            if (c == ',') c = ' ';
        std::istringstream fields(normalized);
        long long d;
        while (fields >> d) w.push_back(static_cast<Digit>(d));
        if (!fields.eof()) throw std::invalid_argument("bad digit list: " + text);
    } else {
        for (char c : text) {
            if (c < '0' || c > '9') throw std::invalid_argument("bad digit list: " + text);
            w.push_back(c - '0');
        }
    }
    if (w.empty()) throw std::invalid_argument("empty digit list");
    return w;
}

// "key=value,key=value" tail of a stream spec
std::vector<std::pair<std::string, std::string>> parse_kv(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        if (comma == std::string::npos) comma = text.size();
        std::string item = text.substr(pos, comma - pos);
        std::size_t eq = item.find('=');
        if (eq == std::string::npos)
            out.emplace_back(item, "");
        else
            out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
        pos = comma + 1;
    }
    return out;
}

}  // namespace

std::shared_ptr<DigitStream> parse_stream_spec(const std::string& spec, int frac_bits,
                                               std::uint64_t seed) {
    std::size_t colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string tail = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (head == "thue-morse") {
        if (!tail.empty()) throw std::invalid_argument("thue-morse takes no arguments");
        return std::make_shared<ThueMorseStream>();
    }
    if (head == "periodic") return std::make_shared<PeriodicStream>(parse_digit_list(tail));
    if (head == "explicit") return std::make_shared<ExplicitStream>(parse_digit_list(tail));
    if (head == "sturmian") {
        std::optional<FixedPoint> theta, rho;
        for (const auto& [key, value] : parse_kv(tail)) {
            if (key == "theta")
                theta = eval_param(*parse_param(value), frac_bits);
            else if (key == "rho")
                rho = eval_param(*parse_param(value), frac_bits);
            else
                throw std::invalid_argument("sturmian: unknown option '" + key + "'");
        }
        if (!theta) throw std::invalid_argument("sturmian needs theta=<expr>");
        if (!rho) rho = FixedPoint(BigInt(0), frac_bits);
        return std::make_shared<SturmianStream>(*theta, *rho);
    }
    if (head == "recurrent") {
        std::string path;
        bool cycle = false, randomized = false;
        for (const auto& [key, value] : parse_kv(tail)) {
            if (key == "file")
                path = value;
            else if (key == "cycle" && value.empty())
                cycle = true;
            else if (key == "random" && value.empty())
                randomized = true;
            else
                throw std::invalid_argument("recurrent: unknown option '" + key + "'");
        }
        if (path.empty()) throw std::invalid_argument("recurrent needs file=<path>");
        if (cycle && randomized)
            throw std::invalid_argument("recurrent: choose at most one of cycle, random");
        auto words = load_building_words_file(path);
        auto builder = randomized ? RecurrentBuilder::random(std::move(words), seed)
                                  : RecurrentBuilder::from_words(std::move(words), cycle);
        return std::make_shared<RecurrentStream>(std::move(builder));
    }
    throw std::invalid_argument("unknown stream kind: '" + head + "'");
}

}  // namespace rotlab
