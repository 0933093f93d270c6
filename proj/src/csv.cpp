#include "sdglab/csv.hpp"

namespace sdglab::csv {

std::optional<std::vector<std::string>> read_record(std::istream& in) {
    std::vector<std::string> fields;
    std::string cur;
    bool in_quotes = false;
    bool saw_any = false;
    int c;
    while ((c = in.get()) != EOF) {
        saw_any = true;
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == '"') {
                if (in.peek() == '"') {
                    in.get();
                    cur.push_back('"');
                } else {
                    in_quotes = false;
                }
            } else {
                cur.push_back(ch);
            }
        } else if (ch == '"') {
            in_quotes = true;
        } else if (ch == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (ch == '\r') {
            // swallow; handled with the following \n
        } else if (ch == '\n') {
            fields.push_back(std::move(cur));
            return fields;
        } else {
            cur.push_back(ch);
        }
    }
    if (!saw_any) return std::nullopt;
    fields.push_back(std::move(cur));
    return fields;
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += "\"\"";
        else out.push_back(ch);
    }
    out.push_back('"');
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string out;
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape(fields[i]);
    }
    return out;
}

}  // namespace sdglab::csv
