"""机构模型模块"""
