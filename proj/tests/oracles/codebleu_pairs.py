"""Rust candidate/reference pairs for the CodeBLEU agreement fixture."""

PAIRS = [
    # 1: identical bodies, different formatting
    ("fn add(a: i32, b: i32) -> i32 {\n    a + b\n}",
     "fn add(a: i32, b: i32) -> i32 { a + b }"),
    # 2: renamed parameters
    ("fn scale(x: u32, k: u8) -> u32 {\n    x * k as u32\n}",
     "fn scale(value: u32, factor: u8) -> u32 {\n    value * u32::from(factor)\n}"),
    # 3: pub function, loop translated two ways
    ("pub fn sum(v: &[i32]) -> i32 {\n    let mut s = 0;\n    for x in v {\n        s += *x;\n    }\n    s\n}",
     "pub fn sum(v: &[i32]) -> i32 {\n    v.iter().sum()\n}"),
    # 4: unsafe pointer walk against safe slice
    ("pub unsafe extern \"C\" fn count(p: *const u8, n: usize) -> usize {\n    let mut c = 0;\n    let mut i = 0;\n    while i < n {\n        if *p.add(i) != 0 {\n            c += 1;\n        }\n        i += 1;\n    }\n    c\n}",
     "pub fn count(p: &[u8]) -> usize {\n    p.iter().filter(|b| **b != 0).count()\n}"),
    # 5: comments in the candidate only
    ("// Greatest common divisor.\nfn gcd(mut a: u64, mut b: u64) -> u64 {\n    /* Euclid */\n    while b != 0 {\n        let t = b;\n        b = a % b; // step\n        a = t;\n    }\n    a\n}",
     "fn gcd(mut a: u64, mut b: u64) -> u64 {\n    while b != 0 {\n        let t = b;\n        b = a % b;\n        a = t;\n    }\n    a\n}"),
    # 6: struct plus impl
    ("#[repr(C)]\npub struct point {\n    pub x: i32,\n    pub y: i32,\n}\nimpl point {\n    fn norm1(self) -> i32 {\n        self.x.abs() + self.y.abs()\n    }\n}",
     "#[repr(C)]\npub struct point {\n    pub x: i32,\n    pub y: i32,\n}\nimpl point {\n    fn norm1(&self) -> i32 {\n        self.x.abs() + self.y.abs()\n    }\n}"),
    # 7: constants and a static
    ("pub const PAGE_SIZE: u32 = 4096;\npub static mut counter: i32 = 0;",
     "pub const PAGE_SIZE: usize = 4096;\npub static mut counter: i32 = 0;"),
    # 8: match against if chain
    ("fn classify(c: i32) -> i32 {\n    match c {\n        0 => 10,\n        1 | 2 => 20,\n        _ => 30,\n    }\n}",
     "fn classify(c: i32) -> i32 {\n    if c == 0 {\n        10\n    } else if c == 1 || c == 2 {\n        20\n    } else {\n        30\n    }\n}"),
    # 9: string literal containing comment markers
    ("fn banner() -> &'static str {\n    \"// not a comment /* still not */\"\n}",
     "fn banner() -> &'static str {\n    \"plain text\"\n}"),
    # 10: lifetimes that the comment stripper treats as quotes
    ("fn first<'a>(x: &'a str, y: &'a str) -> &'a str {\n    if x.len() > 0 { x } else { y } // pick\n}",
     "fn first<'a>(x: &'a str, y: &'a str) -> &'a str {\n    if !x.is_empty() { x } else { y }\n}"),
    # 11: completely different functions
    ("fn alpha(n: i64) -> i64 {\n    n - 1\n}",
     "pub fn omega(items: &mut Vec<String>, limit: usize) {\n    items.truncate(limit);\n    items.sort();\n}"),
    # 12: wrapping arithmetic fix
    ("fn lowbit(size: u32) -> u32 {\n    size & (0u32.wrapping_sub(size))\n}",
     "fn lowbit(size: u32) -> u32 {\n    size & !size.wrapping_add(1)\n}"),
    # 13: several parameters with shared types
    ("fn clamp(v: i32, lo: i32, hi: i32) -> i32 {\n    if v < lo { lo } else if v > hi { hi } else { v }\n}",
     "fn clamp(v: i32, lo: i32, hi: i32) -> i32 {\n    v.max(lo).min(hi)\n}"),
    # 14: unicode inside a string
    ("fn greet() -> &'static str {\n    \"grüße, 世界\"\n}",
     "fn greet() -> &'static str {\n    \"hello, world\"\n}"),
    # 15: extern block against a definition
    ("extern \"C\" {\n    pub fn helper(x: i32) -> i32;\n}\npub unsafe fn call(x: i32) -> i32 {\n    helper(x) + 1\n}",
     "pub fn helper(x: i32) -> i32 {\n    x * 2\n}\npub fn call(x: i32) -> i32 {\n    helper(x) + 1\n}"),
    # 16: enum and a function using it
    ("#[derive(Clone, Copy, PartialEq)]\npub enum Mode {\n    Read,\n    Write,\n}\nfn writable(m: Mode) -> bool {\n    m == Mode::Write\n}",
     "#[derive(Clone, Copy, PartialEq, Eq)]\npub enum Mode {\n    Read,\n    Write,\n    Append,\n}\nfn writable(m: Mode) -> bool {\n    matches!(m, Mode::Write | Mode::Append)\n}"),
    # 17: nested loops with labels
    ("fn find(grid: &[[u8; 4]; 4], t: u8) -> Option<(usize, usize)> {\n    'outer: for i in 0..4 {\n        for j in 0..4 {\n            if grid[i][j] == t {\n                return Some((i, j));\n            }\n            if grid[i][j] == 0 {\n                continue 'outer;\n            }\n        }\n    }\n    None\n}",
     "fn find(grid: &[[u8; 4]; 4], t: u8) -> Option<(usize, usize)> {\n    for i in 0..4 {\n        for j in 0..4 {\n            if grid[i][j] == t {\n                return Some((i, j));\n            }\n        }\n    }\n    None\n}"),
    # 18: short item, fewer than four tokens of overlap
    ("fn z() {}",
     "fn zero() -> u8 {\n    0\n}"),
    # 19: raw pointer struct manipulation
    ("#[repr(C)]\npub struct node {\n    pub value: i32,\n    pub next: *mut node,\n}\npub unsafe fn length(mut n: *mut node) -> usize {\n    let mut k = 0;\n    while !n.is_null() {\n        k += 1;\n        n = (*n).next;\n    }\n    k\n}",
     "#[repr(C)]\npub struct node {\n    pub value: i32,\n    pub next: *mut node,\n}\npub unsafe fn length(n: *mut node) -> usize {\n    let mut k = 0;\n    let mut cur = n;\n    while !cur.is_null() {\n        k += 1;\n        cur = (*cur).next;\n    }\n    k\n}"),
    # 20: identical text
    ("pub fn ident(x: u8) -> u8 {\n    x\n}",
     "pub fn ident(x: u8) -> u8 {\n    x\n}"),
]
