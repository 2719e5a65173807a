#include "testlib.h"
#include <bits/stdc++.h>
using namespace std;
void readAndCheckAnswer(InStream& stream, const string& pn, const string& who) {
    string line = stream.readLine();
    if (line.empty()) {
        stream.quitf(_wa, "%s: empty line", who.c_str());
    }
    // Validate characters: no whitespace allowed, only digits and '-'
    for (size_t i = 0; i < line.size(); ++i) {
        unsigned char uc = static_cast<unsigned char>(line[i]);
        if (std::isspace(uc)) {
            stream.quitf(_wa, "%s: whitespace at position %d", who.c_str(), (int)i + 1);
        }
        if (line[i] != '-' && !std::isdigit(uc)) {
            // Print the offending character; if non-printable, show its code
            if (std::isprint(uc)) {
                stream.quitf(_wa, "%s: illegal character '%c' at position %d", who.c_str(), line[i], (int)i + 1);
            } else {
                stream.quitf(_wa, "%s: illegal character with code %d at position %d", who.c_str(), (int)uc, (int)i + 1);
            }
        }
    }
    // Split line into groups on '-'
    vector<string> groups;
    string cur;
    for (char c : line) {
        if (c == '-') {
            groups.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    groups.push_back(cur);
    // For each group, check that it consists of digits
    for (size_t i = 0; i < groups.size(); ++i) {
        if (!all_of(groups[i].begin(), groups[i].end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); })) {
            stream.quitf(_wa, "%s: group %d contains a non-digit", who.c_str(), (int)i + 1);
        }
    }
    // Concatenate all groups and check if it matches pn
    string reconstructed;
    for (const auto& g : groups) {
        reconstructed += g;
    }
    if (reconstructed != pn) {
        stream.quitf(_wa, "%s: digits do not match the phone number", who.c_str());
    }
}
int main(int argc, char* argv[]) {
    registerTestlibCmd(argc, argv);
    int n = inf.readInt(2, 100);
    string pn = inf.readToken(format("[0-9]{%d}", n), "pn");
    readAndCheckAnswer(ans, pn, "jury's answer");
    readAndCheckAnswer(ouf, pn, "participant's answer");
    quitf(_ok, "Correct");
}
