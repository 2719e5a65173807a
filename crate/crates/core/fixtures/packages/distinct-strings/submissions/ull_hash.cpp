#include <bits/stdc++.h>
using namespace std;

typedef unsigned long long ull;

int main() {
    int n;
    cin >> n;
    set<ull> seen;
    for (int i = 0; i < n; i++) {
        string s;
        cin >> s;
        ull h = 0;
        for (char c : s) h = h * 131 + (c - 'a' + 1);
        seen.insert(h);
    }
    cout << seen.size() << "\n";
}
