#include <bits/stdc++.h>
using namespace std;

int main() {
    int n;
    string s;
    cin >> n >> s;
    string out;
    int i = 0;
    while (n - i > 3) {
        out += s.substr(i, 2) + "-";
        i += 2;
    }
    out += s.substr(i);
    cout << out << "\n";
}
