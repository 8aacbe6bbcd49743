package com.acme.app;

import com.acme.geo.Circle;
import com.acme.geo.Shape;

public class Main {
    static int runs = 0;

    public static void main(String[] args) {
        Shape s = new Circle(2.0);
        report(s);
    }

    static void report(Shape shape) {
        String text = format(shape.area());
        System.out.println(text);
    }

    static String format(double value) {
        return String.format("%.2f", value);
    }

    static class Counter {
        private int count;

        void increment() {
            count += 1;
        }

        void reset() {
            count = 0;
        }

        int get() {
            return count;
        }
    }
}
