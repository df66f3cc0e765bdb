#[repr(C)]
#[derive(Clone, Copy)]
pub struct acc {
    pub sum: i32,
    pub count: i32,
}

pub const LIMIT: u32 = 100;

pub static mut counter: i32 = 0;

pub unsafe fn acc_mean(a: *const acc) -> i32 {
    if (*a).count == 0 {
        return 0;
    }
    (*a).sum / (*a).count
}

pub fn clamp(v: i32) -> i32 {
    if v > LIMIT as i32 {
        return LIMIT as i32;
    }
    if v < 0 {
        return 0;
    }
    v
}

pub unsafe fn acc_add(a: *mut acc, v: i32) {
    (*a).sum += clamp(v);
    (*a).count += 1;
    counter += 1;
}

pub fn twice(v: i32) -> i32 {
    clamp(v * 2)
}

pub fn half(v: i32) -> i32 {
    clamp(v / 2)
}

pub fn mix(v: i32) -> i32 {
    twice(v) + half(v)
}

pub fn sum_range(lo: i32, hi: i32) -> i32 {
    let mut s = 0;
    for i in lo..hi {
        s += mix(i);
    }
    s
}

pub fn is_odd(n: u32) -> i32 {
    if n == 0 {
        return 0;
    }
    is_even(n - 1)
}

pub fn is_even(n: u32) -> i32 {
    if n == 0 {
        return 1;
    }
    is_odd(n - 1)
}

pub fn parity_sum(n: u32) -> i32 {
    let mut k = 0;
    for i in 0..n {
        if is_even(i) != 0 {
            k += 1;
        }
    }
    k
}

pub fn run_all() -> i32 {
    let mut a = acc { sum: 0, count: 0 };
    unsafe {
        acc_add(&mut a, sum_range(0, 10));
        acc_add(&mut a, parity_sum(7));
        acc_mean(&a)
    }
}
