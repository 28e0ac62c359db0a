import logging
from typing import Callable, Dict, Generic, List, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


class Registry(Generic[T]):
    def __init__(self, kind: str):
        """按名称登记求解器的注册中心"""
        self.kind = kind
        self._entries: Dict[str, T] = {}
        logger.debug("注册中心 [%s] 已初始化。", kind)

    def register(self, name: str) -> Callable[[T], T]:
        """
        以装饰器形式注册一个条目。
        用法:
        @registry.register("gmres")
        class Gmres(...):
            ...
        """

        def decorator(entry: T) -> T:
            if name in self._entries:
                raise ValueError(f"{self.kind} '{name}' 已注册")
            self._entries[name] = entry
            logger.debug("%s '%s' 已成功注册。", self.kind, name)
            return entry

        return decorator

    def get(self, name: str) -> T:
        """根据名称获取已注册的条目"""
        try:
            return self._entries[name]
        except KeyError:
            logger.warning("尝试获取一个未注册的 %s: %s", self.kind, name)
            raise KeyError(
                f"未知的 {self.kind} '{name}'，可选: {', '.join(self.names())}"
            ) from None

    def names(self) -> List[str]:
        """按注册顺序返回全部名称"""
        return list(self._entries)

    def __contains__(self, name: object) -> bool:
        return name in self._entries
