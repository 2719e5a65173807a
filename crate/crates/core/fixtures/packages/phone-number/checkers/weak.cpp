#include "testlib.h"
#include <bits/stdc++.h>
using namespace std;
void readAndCheckAnswer(InStream& stream, const string& pn, const string& who) {
    string line = stream.readLine();
    // Remove spaces
    line.erase(remove(line.begin(), line.end(), ' '), line.end());
    // Split line into groups on '-'
    vector<string> groups;
    stringstream ss(line);
    string group;
    while (getline(ss, group, '-')) {
        groups.push_back(group);
    }
    // For each group, check that length is 2 or 3 and consists of digits
    for (size_t i = 0; i < groups.size(); ++i) {
        if (groups[i].length() < 2 || groups[i].length() > 3) {
            stream.quitf(_wa, "%s: group %d has length %d", who.c_str(), (int)i + 1, (int)groups[i].length());
        }
        if (!all_of(groups[i].begin(), groups[i].end(), ::isdigit)) {
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
    quitf(_ok, "Correct answer");
}
