"""Generated by tools/derive_mms.py; do not edit.

Closed forms on the sphere |x| = R for u_T = P w, w = (x2 x3, -x1 x3, x1^2 - x2^2),
p = x1 x2 x3.  Inputs are arrays of surface points (..., 3)."""
import numpy as np


def velocity(y, R):
    x1, x2, x3 = y[..., 0], y[..., 1], y[..., 2]
    t0 = x2*x3
    t1 = R**(-2)
    t2 = x2**2
    t3 = x1*x3
    t4 = x1**2
    t5 = t1*x3**2
    return np.stack([t0 + t1*t2*t3 - t1*x1**3*x3 + 0.0 * x1, -t0*t1*t4 + t1*x2**3*x3 - t3 + 0.0 * x1, t2*t5 - t2 - t4*t5 + t4 + 0.0 * x1], axis=-1)

def velocity_gradient(y, R):
    x1, x2, x3 = y[..., 0], y[..., 1], y[..., 2]
    t0 = x1**4
    t1 = x3**3
    t2 = R**(-6)
    t3 = 2*t2
    t4 = t1*t3
    t5 = t0*t4
    t6 = R**(-2)
    t7 = x2**2
    t8 = R**(-4)
    t9 = t3*x3
    t10 = x1**2
    t11 = t10*t6
    t12 = t11*x3
    t13 = x2**4
    t14 = t10*t7
    t15 = 2*x1
    t16 = t15*x3
    t17 = t16*t6*x2
    t18 = 6*t8
    t19 = t18*x3
    t20 = t14*t19 - t14*t4 + t17
    t21 = t6*t7
    t22 = t21*x3
    t23 = x2**3
    t24 = t19*t23*x1
    t25 = x1**5
    t26 = 2*x2
    t27 = t2*t26
    t28 = t25*t27*x3
    t29 = x1**3
    t30 = t1*t27*t29
    t31 = x2**5
    t32 = t15*t2
    t33 = t17 + x3
    t34 = t29*t6
    t35 = x3**2
    t36 = t35*t6
    t37 = -t26*t36
    t38 = x3**4
    t39 = t18*t35
    t40 = t13*t32*t35 - t25*t3*t35 - t29*t3*t38 + t29*t39 + t32*t38*t7 - t39*t7*x1
    t41 = -t15*t36
    t42 = t0*t27*t35 + t10*t27*t38 - 6*t10*t35*t8*x2 - 2*t2*t23*t38 - 2*t2*t31*t35 + t23*t39
    t43 = x3**5
    out = np.stack([6*t0*t8*x3 + 2*t10*t13*t2*x3 - 3*t12 - t20 - t5 + t6*t7*x3 - t9*x1**6 + 0.0 * x1, t1*t23*t32 + t16*t2*t31 + t19*t29*x2 - 2*t22 - t24 - t28 - t30 + t33 + 0.0 * x1, t21*x1 - t34 + t37 + t40 + x2 + 0.0 * x1, 2*t1*t2*t23*x1 + 2*t10*t6*x3 + 2*t2*t31*x1*x3 - t24 - t28 + 6*t29*t8*x2*x3 - t30 - t33 + 0.0 * x1, -t0*t7*t9 - t12 - t13*t19 + t13*t4 + t20 + 3*t22 + t9*x2**6 + 0.0 * x1, -t11*x2 + t23*t6 - t41 - t42 - x1 + 0.0 * x1, t15*t21 + t15 - 2*t34 + t40 + t41 + 0.0 * x1, -t11*t26 + 2*t23*t6 - t26 - t37 - t42 + 0.0 * x1, 6*t1*t10*t8 + 2*t1*t13*t2 - t1*t18*t7 - t10*t3*t43 - 4*t12 + 2*t2*t43*t7 - t5 + 4*t6*t7*x3 + 0.0 * x1], axis=-1)
    return out.reshape(y.shape[:-1] + (3, 3))

def forcing(y, R):
    x1, x2, x3 = y[..., 0], y[..., 1], y[..., 2]
    t0 = x2*x3
    t1 = R**(-2)
    t2 = t1*x3
    t3 = t2*x1
    t4 = t0*t1
    t5 = x3**5
    t6 = R**(-6)
    t7 = t5*t6
    t8 = t7*x2
    t9 = x2**5
    t10 = t6*x3
    t11 = t10*t9
    t12 = R**(-14)
    t13 = 16*t12
    t14 = t13*x3
    t15 = R**(-12)
    t16 = 98*t15
    t17 = x1**11
    t18 = t17*x3
    t19 = R**(-10)
    t20 = 256*t19
    t21 = x1**9
    t22 = t21*x3
    t23 = R**(-8)
    t24 = 4*t23
    t25 = x3**7
    t26 = t25*x1
    t27 = x1**7
    t28 = t27*x3
    t29 = t7*x1
    t30 = x1**5
    t31 = t10*t30
    t32 = R**(-4)
    t33 = x3**3
    t34 = t32*t33
    t35 = x1**3
    t36 = t32*x3
    t37 = x2**3
    t38 = x1**4
    t39 = t38*t6
    t40 = x2**2
    t41 = t3*t40
    t42 = x2**12
    t43 = x2**10
    t44 = t43*x1
    t45 = t20*x3
    t46 = x2**8
    t47 = t46*x1
    t48 = x2**6
    t49 = t23*t48
    t50 = x2**4
    t51 = t50*x1
    t52 = t10*t51
    t53 = t40*x1
    t54 = x1**2
    t55 = t32*t54
    t56 = t0*t55
    t57 = t4*t54
    t58 = x3**11
    t59 = t13*t58
    t60 = x3**9
    t61 = 80*t12
    t62 = t60*t61
    t63 = 160*t12
    t64 = t25*t63
    t65 = t5*t63
    t66 = t33*t61
    t67 = t16*t60
    t68 = 392*t15
    t69 = t25*t30
    t70 = 588*t15
    t71 = t27*t5
    t72 = t33*t68
    t73 = t20*t25
    t74 = 768*t19
    t75 = t30*t5
    t76 = t33*t74
    t77 = t35*t5
    t78 = t23*t30
    t79 = t33*t6
    t80 = t35*t79
    t81 = 2*t37
    t82 = t48*t63
    t83 = t35*x3
    t84 = 64*t12
    t85 = t43*t84
    t86 = t30*x3
    t87 = t46*t61
    t88 = t50*t61
    t89 = t40*t84
    t90 = t5*t70
    t91 = t48*x1
    t92 = 294*t15
    t93 = t46*t92
    t94 = 196*t15
    t95 = t48*t94
    t96 = t50*t94
    t97 = t15*t40
    t98 = 294*t97
    t99 = t5*t74
    t100 = 512*t19
    t101 = t23*t40
    t102 = 352*t5
    t103 = 716*t33
    t104 = t23*t50
    t105 = t54*x2
    t106 = 2*t79
    t107 = t10*t54
    t108 = t10*t35*t40
    t109 = t35*t50
    t110 = 320*t12
    t111 = t33*t35
    t112 = 240*t12
    t113 = t112*t46
    t114 = t27*t33
    t115 = t50*t63
    t116 = t112*t33
    t117 = 784*t15
    t118 = x2**11
    t119 = x2**9
    t120 = x2**7
    t121 = x1**12
    t122 = x1**10
    t123 = x1**8
    t124 = x1**6
    t125 = t124*t23
    t126 = t37*x3
    t127 = t23*t54
    t128 = t23*t38
    t129 = t54*t9
    t130 = t117*t124
    t131 = x1*x2
    t132 = 2*t23
    t133 = (15/2)*t6
    t134 = (23/2)*t32
    t135 = 11*t1
    t136 = x3**2
    t137 = t1*t136
    t138 = t13*x3**12
    t139 = x3**10
    t140 = t139*t61
    t141 = x3**8
    t142 = t141*t63
    t143 = x3**6
    t144 = t143*t63
    t145 = x3**4
    t146 = t145*t61
    t147 = t13*t136
    t148 = t139*t16
    t149 = t141*t68
    t150 = t143*t70
    t151 = t145*t68
    t152 = t136*t16
    t153 = t141*t20
    t154 = t143*t74
    t155 = t145*t74
    t156 = t136*t20
    t157 = t48*t54
    t158 = 366*t143
    t159 = 734*t145
    t160 = t124*t40
    t161 = 370*t136
    t162 = t50*t54
    t163 = 301*t6
    t164 = t145*t54
    t165 = t38*t40
    t166 = (617/2)*t136
    t167 = t145*t40
    t168 = 126*t136
    t169 = t110*t143
    t170 = t136*t54
    t171 = t136*t38
    t172 = t123*t136
    t173 = t100*t136
    return np.stack([t0*t39 + 2*t0 + t100*t28*t40 - t100*t48*t83 + t101*t102*x1 - 24*t101*t111 + t103*t23*t51 + 352*t104*t83 + t105*t106 + t107*t81 + 26*t108 - t109*t64 - t109*t76 + t11 + t110*t40*t71 - t110*t48*t77 - t111*t113 + t111*t117*t48 + t114*t115 - 784*t114*t97 + t116*t21*t40 - t14*t42*x1 + t14*x1**13 - t16*t18 + t16*t44*x3 + t17*t66 + t18*t89 - t2*t35 + t20*t22 - t20*t26*t40 + t21*t65 - t21*t72 + t22*t88 - t22*t98 - 368*t23*t28 - 376*t23*t77 - t24*t26 + t26*t50*t68 - t26*t82 + t27*t64 + t27*t76 - t28*t96 + 13*t29 + 15*t3 - t30*t33*t82 + t30*t40*t76 + t30*t62 + (613/2)*t31 - 740*t33*t78 - 18*t34*x1 - 5/2*t34*x2 - 265/2*t35*t36 + t35*t59 - t35*t67 + t35*t73 - 5/2*t36*t37 + (193/2)*t36*t53 + (7/2)*t4 + t40*t63*t69 - t40*t70*t75 - 376*t40*t78*x3 + t41 - t44*t66 - t45*t47 - t47*t65 + t47*t72 + 360*t49*x1*x3 + t50*t70*t77 - t51*t62 - t51*t99 - 561/2*t52 - t53*t59 + t53*t67 - 535/2*t53*t79 - 5/2*t56 - 3*t57 - t68*t69 - t70*t71 + t74*t75 - t76*t91 + t79*t81 + t8 + (639/2)*t80 - t83*t85 + t83*t93 - t86*t87 + t86*t95 + t90*t91 + 0.0 * x1, -t0*t122*t16 - 360*t0*t125 + t1*t37*x3 - t100*t120*t54*x3 - t102*t127*x2 - t103*t128*x2 - t105*t67 - t106*t53 - 26*t107*t37 - 2*t108 - 613/2*t11 - t110*t120*t5*t54 - t116*t119*t54 + 98*t118*t15*x3 - t118*t54*t84*x3 - t118*t66 + 392*t119*t15*t33 + 294*t119*t15*t54*x3 - t119*t38*t61*x3 - t119*t45 - t119*t65 + 16*t12*t121*x2*x3 + 80*t12*t122*t33*x2 + 64*t12*t122*t37*x3 + 240*t12*t123*t33*t37 + 160*t12*t123*t5*x2 + 80*t12*t123*t9*x3 + 160*t12*t124*t25*x2 + 160*t12*t124*t33*t9 + 320*t12*t124*t37*t5 + 160*t12*t25*t37*t38 + 80*t12*t38*t60*x2 + 16*t12*t54*t58*x2 + 784*t120*t15*t33*t54 + 196*t120*t15*t38*x3 + 588*t120*t15*t5 + 368*t120*t23*x3 - t120*t33*t38*t63 - t120*t64 - t120*t76 - t123*t126*t92 + 256*t123*t19*x2*x3 - t123*t72*x2 + 768*t124*t19*t33*x2 + 512*t124*t19*t37*x3 - t124*t9*t94*x3 - t124*t90*x2 - 352*t126*t128 - t129*t64 - t129*t76 - t130*t33*t37 - t14*x2**13 + 392*t15*t25*t9 + 98*t15*t37*t60 + 588*t15*t5*t54*t9 + 256*t19*t25*t54*x2 + 768*t19*t33*t37*t38 + 768*t19*t38*t5*x2 + 4*t23*t25*x2 + 24*t23*t33*t37*t54 + 740*t23*t33*t9 + 376*t23*t37*t5 + 376*t23*t54*t9*x3 - t25*t38*t68*x2 - t29 - 7/2*t3 - t31 + (5/2)*t32*t33*x1 + 18*t32*t33*x2 + (5/2)*t32*t35*x3 + (265/2)*t32*t37*x3 + (5/2)*t32*t40*x1*x3 + (535/2)*t33*t54*t6*x2 - t37*t38*t5*t70 - t37*t59 - t37*t73 - 639/2*t37*t79 + (561/2)*t38*t6*x2*x3 - 15*t4 - 3*t41 - t52 - 193/2*t56 - t57 - t62*t9 - 13*t8 - 2*t80 - t9*t99 + 0.0 * x1, t101*t158 + t104*t159 + t112*t123*t167 - t113*t164 + t115*t124*t145 + t117*t145*t157 + t121*t147 + t122*t136*t89 + t122*t146 - t122*t152 - t123*t132 + t123*t144 - t123*t151 + t123*t156 + t124*t133 - t124*t136*t96 + t124*t142 - t124*t150 + t124*t155 - t125*t161 - t127*t158 + t127*t161*t50 - t128*t159 - t128*t161*t40 - t130*t167 - 3*t131*t137 + t131 + t132*t46 - t133*t162 + t133*t165 - t133*t48 - t134*t38 + t134*t50 - t135*t40 + t135*t54 + t137*t40 - t137*t54 - t138*t40 + t138*t54 + t140*t38 - t140*t50 - t142*t162 + t142*t165 - t142*t48 - t144*t46 - t145*t38*t82 - t146*t43 - t147*t42 + t148*t40 - t148*t54 - t149*t38 + t149*t50 + t150*t162 - t150*t165 + t150*t48 + t151*t46 + t152*t43 - t153*t40 + t153*t54 + t154*t38 - t154*t50 - t155*t162 + t155*t165 - t155*t48 - t156*t46 - t157*t169 - t157*t173 + t157*t24 + t160*t169 + t160*t173 - t160*t24 + t161*t49 + t163*t164 - t163*t167 + t166*t39 - t166*t50*t6 + t168*t32*t40 - t168*t55 - t170*t85 + t170*t93 - t171*t87 + t171*t95 + t172*t88 - t172*t98 - t40 + t54 + 0.0 * x1], axis=-1)

def source(y, R):
    x1, x2, x3 = y[..., 0], y[..., 1], y[..., 2]
    t0 = R**(-6)
    t1 = 2*t0
    t2 = R**(-4)
    t3 = x1**4
    t4 = x2**4
    t5 = 6*t2
    t6 = x1**2
    t7 = R**(-2)
    t8 = x2**2
    t9 = x3**5
    t10 = t0*t3
    t11 = x3**3
    return 4*t0*t11*t4 + 2*t0*t4*t6*x3 + 2*t0*t8*t9 + 2*t0*x2**6*x3 - t1*t6*t9 - t1*x1**6*x3 - 4*t10*t11 - 2*t10*t8*x3 + 6*t11*t2*t6 - t11*t5*t8 + 6*t2*t3*x3 - t4*t5*x3 - 8*t6*t7*x3 + 8*t7*t8*x3 + 0.0 * x1
